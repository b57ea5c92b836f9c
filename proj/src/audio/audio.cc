// Copyright 2026 The TTML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "audio/audio.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <numeric>
#include <string>

#include "audio/fft.h"
#include "common/error.h"

namespace ttml {
namespace {

uint16_t ReadU16(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint16_t>(b[at] | (b[at + 1] << 8));
}

uint32_t ReadU32(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint32_t>(b[at]) | (static_cast<uint32_t>(b[at + 1]) << 8) |
         (static_cast<uint32_t>(b[at + 2]) << 16) | (static_cast<uint32_t>(b[at + 3]) << 24);
}

void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutTag(std::vector<uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

bool TagIs(std::span<const uint8_t> b, size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

std::string FormatName(uint16_t code) {
  switch (code) {
    case 2: return "ADPCM";
    case 6: return "A-law";
    case 7: return "mu-law";
    default: return "format code " + std::to_string(code);
  }
}

// Kaiser-windowed sinc with the window spanning [-half_width, half_width].
class SincKernel {
 public:
  SincKernel(double cutoff, double half_width) : cutoff_(cutoff), half_width_(half_width) {
    inv_i0_beta_ = 1.0 / std::cyl_bessel_i(0.0, kBeta);
  }
  double operator()(double d) const {
    if (std::abs(d) >= half_width_) return 0.0;
    const double x = 2.0 * cutoff_ * d;
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = d / half_width_;
    const double win = std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - r * r)) * inv_i0_beta_;
    return sinc * win;
  }

 private:
  static constexpr double kBeta = 8.6;
  double cutoff_;
  double half_width_;
  double inv_i0_beta_;
};

constexpr double kZeroCrossings = 32.0;
constexpr double kRolloff = 0.97;
constexpr int64_t kMaxCachedPhases = 1024;

}  // namespace

AudioClip DecodeWav(std::span<const uint8_t> b) {
  if (b.size() < 12 || !TagIs(b, 0, "RIFF") || !TagIs(b, 8, "WAVE")) {
    Fail(ErrorCode::kDecodeError, "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  uint32_t rate = 0;
  std::span<const uint8_t> data;
  bool have_data = false;
  size_t at = 12;
  while (at + 8 <= b.size()) {
    const uint32_t len = ReadU32(b, at + 4);
    const size_t body = at + 8;
    if (len > b.size() - body) Fail(ErrorCode::kDecodeError, "truncated WAV chunk");
    if (TagIs(b, at, "fmt ")) {
      if (len < 16) Fail(ErrorCode::kDecodeError, "fmt chunk too short");
      format = ReadU16(b, body);
      channels = ReadU16(b, body + 2);
      rate = ReadU32(b, body + 4);
      block_align = ReadU16(b, body + 12);
      bits = ReadU16(b, body + 14);
      if (format == kFormatExtensible) {
        if (len < 40) Fail(ErrorCode::kDecodeError, "extensible fmt chunk too short");
        format = ReadU16(b, body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (TagIs(b, at, "data")) {
      data = b.subspan(body, len);
      have_data = true;
    }
    at = body + len + (len & 1u);
  }
  if (!have_fmt || !have_data) Fail(ErrorCode::kDecodeError, "WAV is missing fmt or data chunk");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    Fail(ErrorCode::kUnsupportedEncoding,
         "WAV encoding " + FormatName(format) + " with " + std::to_string(bits) +
             " bits is not supported (PCM16 or float32 only)");
  }
  if (channels < 1 || channels > 2) {
    Fail(ErrorCode::kUnsupportedEncoding, std::to_string(channels) + "-channel WAV not supported");
  }
  if (rate == 0) Fail(ErrorCode::kDecodeError, "WAV sample rate is zero");
  const size_t width = bits / 8;
  if (block_align != width * channels) Fail(ErrorCode::kDecodeError, "inconsistent block align");
  if (data.size() % block_align != 0) Fail(ErrorCode::kDecodeError, "partial sample frame");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  const size_t frames = data.size() / block_align;
  clip.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    double sum = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const size_t off = i * block_align + c * width;
      double v;
      if (pcm16) {
        v = static_cast<int16_t>(ReadU16(data, off)) / 32768.0;
      } else {
        const uint32_t raw = ReadU32(data, off);
        float f;
        std::memcpy(&f, &raw, 4);
        if (!std::isfinite(f)) Fail(ErrorCode::kDecodeError, "non-finite float sample");
        v = std::clamp(static_cast<double>(f), -1.0, 1.0);
      }
      sum += v;
    }
    clip.samples[i] = static_cast<float>(sum / channels);
  }
  return clip;
}

std::vector<uint8_t> EncodeWav(const std::vector<std::vector<float>>& channels, int sample_rate,
                               WavEncoding encoding) {
  if (channels.empty()) Fail(ErrorCode::kValidationError, "no channels");
  const size_t frames = channels[0].size();
  for (const auto& ch : channels) {
    if (ch.size() != frames) Fail(ErrorCode::kShapeMismatch, "channel lengths differ");
  }
  const uint16_t width = encoding == WavEncoding::kPcm16 ? 2 : 4;
  const auto nch = static_cast<uint16_t>(channels.size());
  const uint32_t data_len = static_cast<uint32_t>(frames * nch * width);
  std::vector<uint8_t> out;
  out.reserve(44 + data_len);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_len);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(out, nch);
  PutU32(out, static_cast<uint32_t>(sample_rate));
  PutU32(out, static_cast<uint32_t>(sample_rate) * nch * width);
  PutU16(out, static_cast<uint16_t>(nch * width));
  PutU16(out, static_cast<uint16_t>(width * 8));
  PutTag(out, "data");
  PutU32(out, data_len);
  for (size_t i = 0; i < frames; ++i) {
    for (const auto& ch : channels) {
      const float v = ch[i];
      if (encoding == WavEncoding::kPcm16) {
        const double s = std::clamp(std::round(static_cast<double>(v) * 32768.0), -32768.0, 32767.0);
        PutU16(out, static_cast<uint16_t>(static_cast<int16_t>(s)));
      } else {
        uint32_t raw;
        std::memcpy(&raw, &v, 4);
        PutU32(out, raw);
      }
    }
  }
  return out;
}

AudioClip Resample(const AudioClip& clip, int target_rate) {
  if (clip.sample_rate <= 0 || target_rate <= 0) {
    Fail(ErrorCode::kConfigError, "sample rates must be positive");
  }
  if (clip.sample_rate == target_rate) return clip;
  const int64_t g = std::gcd(clip.sample_rate, target_rate);
  const int64_t up = target_rate / g;
  const int64_t down = clip.sample_rate / g;
  const auto in_len = static_cast<int64_t>(clip.samples.size());
  const auto out_len = static_cast<int64_t>(
      std::llround(static_cast<double>(in_len) * target_rate / clip.sample_rate));

  // Cutoff in cycles per input sample.
  const double cutoff = 0.5 * kRolloff * std::min(1.0, static_cast<double>(up) / down);
  const double half_width = kZeroCrossings / (2.0 * cutoff);
  const auto reach = static_cast<int64_t>(std::ceil(half_width));
  const int64_t taps = 2 * reach + 2;
  const SincKernel kernel(cutoff, half_width);

  // Output n sits at input time n*down/up = base + phase/up. Tap j reads
  // x[base - reach + j]; weights are normalized to unit DC gain per phase.
  auto fill_phase = [&](int64_t phase, double* w) {
    const double frac = static_cast<double>(phase) / static_cast<double>(up);
    double sum = 0.0;
    for (int64_t j = 0; j < taps; ++j) {
      w[j] = kernel(frac - static_cast<double>(j - reach));
      sum += w[j];
    }
    for (int64_t j = 0; j < taps; ++j) w[j] /= sum;
  };
  const bool cached = up <= kMaxCachedPhases;
  std::vector<double> table(static_cast<size_t>((cached ? up : 1) * taps));
  if (cached) {
    for (int64_t p = 0; p < up; ++p) fill_phase(p, table.data() + p * taps);
  }

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(out_len));
  for (int64_t n = 0; n < out_len; ++n) {
    const int64_t pos = n * down;
    const int64_t base = pos / up;
    const int64_t phase = pos % up;
    const double* w;
    if (cached) {
      w = table.data() + phase * taps;
    } else {
      fill_phase(phase, table.data());
      w = table.data();
    }
    double acc = 0.0;
    const int64_t first = base - reach;
    const int64_t j0 = std::max<int64_t>(0, -first);
    const int64_t j1 = std::min<int64_t>(taps, in_len - first);
    for (int64_t j = j0; j < j1; ++j) acc += w[j] * clip.samples[static_cast<size_t>(first + j)];
    out.samples[static_cast<size_t>(n)] = static_cast<float>(std::clamp(acc, -1.0, 1.0));
  }
  return out;
}

AudioClip TrimSilence(const AudioClip& clip, double threshold_rms, double frame_seconds) {
  if (!(threshold_rms >= 0.0)) Fail(ErrorCode::kConfigError, "silence threshold must be >= 0");
  if (!(frame_seconds > 0.0)) Fail(ErrorCode::kConfigError, "trim frame length must be > 0");
  const auto frame = std::max<size_t>(
      1, static_cast<size_t>(std::llround(frame_seconds * clip.sample_rate)));
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  const size_t n = clip.samples.size();
  for (size_t start = 0; start < n; start += frame) {
    const size_t end = std::min(n, start + frame);
    double energy = 0.0;
    for (size_t i = start; i < end; ++i) energy += double(clip.samples[i]) * clip.samples[i];
    const double rms = std::sqrt(energy / static_cast<double>(end - start));
    if (rms >= threshold_rms) {
      out.samples.insert(out.samples.end(), clip.samples.begin() + static_cast<ptrdiff_t>(start),
                         clip.samples.begin() + static_cast<ptrdiff_t>(end));
    }
  }
  if (out.samples.empty()) {
    Fail(ErrorCode::kEmptyAfterTrim, "clip is silent at RMS threshold " + std::to_string(threshold_rms));
  }
  return out;
}

Tensor StftMagnitude(const AudioClip& clip) {
  using namespace audio;
  if (clip.sample_rate != kSampleRate) {
    Fail(ErrorCode::kConfigError, "STFT expects 16 kHz audio, got " + std::to_string(clip.sample_rate));
  }
  const auto len = static_cast<int64_t>(clip.samples.size());
  if (len < kWindow) {
    Fail(ErrorCode::kTooShort, "clip has " + std::to_string(len) + " samples, need " + std::to_string(kWindow));
  }
  static const std::vector<double> window = [] {
    std::vector<double> w(kWindow);
    for (int i = 0; i < kWindow; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / kWindow);
    }
    return w;
  }();
  const int64_t frames = 1 + (len - kWindow) / kHop;
  std::vector<float> mag(static_cast<size_t>(frames * kBins));
  std::vector<std::complex<double>> buf(kFftSize);
  for (int64_t f = 0; f < frames; ++f) {
    const float* x = clip.samples.data() + f * kHop;
    for (int i = 0; i < kFftSize; ++i) buf[i] = i < kWindow ? x[i] * window[i] : 0.0;
    Fft(buf);
    for (int k = 0; k < kBins; ++k) mag[f * kBins + k] = static_cast<float>(std::abs(buf[k]));
  }
  return Tensor::FromData({frames, kBins}, std::move(mag));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

const Tensor& MelWeightMatrix() {
  using namespace audio;
  static const Tensor weights = [] {
    const double lo = HzToMel(kMelLowHz);
    const double hi = HzToMel(kMelHighHz);
    std::vector<double> edges(kMelBands + 2);
    for (int i = 0; i < kMelBands + 2; ++i) edges[i] = lo + (hi - lo) * i / (kMelBands + 1);
    std::vector<float> w(static_cast<size_t>(kBins * kMelBands), 0.0f);
    for (int k = 0; k < kBins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * kSampleRate / kFftSize);
      for (int b = 0; b < kMelBands; ++b) {
        const double rise = (mel - edges[b]) / (edges[b + 1] - edges[b]);
        const double fall = (edges[b + 2] - mel) / (edges[b + 2] - edges[b + 1]);
        w[k * kMelBands + b] = static_cast<float>(std::max(0.0, std::min(rise, fall)));
      }
    }
    return Tensor::FromData({kBins, kMelBands}, std::move(w));
  }();
  return weights;
}

Tensor MelFilterbank(const Tensor& magnitudes) {
  using namespace audio;
  if (magnitudes.rank() != 2 || magnitudes.dim(1) != kBins) {
    Fail(ErrorCode::kShapeMismatch, "mel filterbank expects (frames, 257), got " +
                                        ShapeToString(magnitudes.shape()));
  }
  const int64_t frames = magnitudes.dim(0);
  const auto w = MelWeightMatrix().data();
  const auto m = magnitudes.data();
  std::vector<float> out(static_cast<size_t>(frames * kMelBands));
  std::vector<double> acc(kMelBands);
  for (int64_t f = 0; f < frames; ++f) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int k = 0; k < kBins; ++k) {
      const double v = m[f * kBins + k];
      if (v == 0.0) continue;
      for (int b = 0; b < kMelBands; ++b) acc[b] += v * w[k * kMelBands + b];
    }
    for (int b = 0; b < kMelBands; ++b) out[f * kMelBands + b] = static_cast<float>(acc[b]);
  }
  return Tensor::FromData({frames, kMelBands}, std::move(out));
}

Tensor LogMel(const Tensor& mel) {
  std::vector<float> out(mel.data().begin(), mel.data().end());
  for (float& v : out) v = static_cast<float>(std::log(static_cast<double>(v) + audio::kLogOffset));
  Tensor t = Tensor::FromData(mel.shape(), std::move(out));
  t.CheckFinite("log-mel");
  return t;
}

Tensor FramePatches(const Tensor& log_mel) {
  using namespace audio;
  if (log_mel.rank() != 2 || log_mel.dim(1) != kMelBands || log_mel.dim(0) < 1) {
    Fail(ErrorCode::kShapeMismatch, "patching expects (frames >= 1, 64), got " +
                                        ShapeToString(log_mel.shape()));
  }
  const int64_t frames = log_mel.dim(0);
  const int64_t patches = 1 + std::max<int64_t>(frames - kPatchFrames, 0) / kPatchHop;
  const auto pad = static_cast<float>(std::log(kLogOffset));
  std::vector<float> out(static_cast<size_t>(patches * kPatchFrames * kMelBands), pad);
  const auto src = log_mel.data();
  for (int64_t p = 0; p < patches; ++p) {
    for (int64_t t = 0; t < kPatchFrames; ++t) {
      const int64_t f = p * kPatchHop + t;
      if (f >= frames) break;
      std::copy_n(src.begin() + f * kMelBands, kMelBands,
                  out.begin() + (p * kPatchFrames + t) * kMelBands);
    }
  }
  return Tensor::FromData({patches, kPatchFrames, kMelBands, 1}, std::move(out));
}

Tensor AudioToPatches(const AudioClip& clip, const AudioFrontendConfig& cfg) {
  AudioClip x = Resample(clip, audio::kSampleRate);
  if (cfg.trim) x = TrimSilence(x, cfg.silence_threshold);
  if (x.samples.empty()) Fail(ErrorCode::kTooShort, "clip has no samples");
  if (x.samples.size() < static_cast<size_t>(audio::kWindow)) x.samples.resize(audio::kWindow, 0.0f);
  return FramePatches(LogMel(MelFilterbank(StftMagnitude(x))));
}

}  // namespace ttml
