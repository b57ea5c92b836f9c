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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "audio/audio.h"
#include "audio/fft.h"
#include "common/error.h"
#include "common/rng.h"
#include "gtest/gtest.h"
#include "support/dsp_oracle.h"

namespace ttml {
namespace {

constexpr double kPi = std::numbers::pi;
using testing::DftMagnitude;
using testing::HannFrame;

std::vector<float> Sine(double freq, double rate, size_t n, double amp = 1.0) {
  std::vector<float> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = static_cast<float>(amp * std::sin(2 * kPi * freq * i / rate));
  return x;
}

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

TEST(DecodeWavTest, Pcm16Scaling) {
  std::vector<uint8_t> wav = EncodeWav({{0.0f, 0.5f}}, 16000, WavEncoding::kPcm16);
  // Overwrite the second sample with 32767.
  wav[wav.size() - 2] = 0xFF;
  wav[wav.size() - 1] = 0x7F;
  AudioClip clip = DecodeWav(wav);
  ASSERT_EQ(clip.samples.size(), 2u);
  EXPECT_EQ(clip.sample_rate, 16000);
  EXPECT_FLOAT_EQ(clip.samples[1], 32767.0f / 32768.0f);
}

TEST(DecodeWavTest, StereoIsAveraged) {
  AudioClip clip = DecodeWav(EncodeWav({{0.5f, 0.25f}, {-0.5f, 0.75f}}, 22050, WavEncoding::kFloat32));
  ASSERT_EQ(clip.samples.size(), 2u);
  EXPECT_EQ(clip.samples[0], 0.0f);
  EXPECT_EQ(clip.samples[1], 0.5f);
}

TEST(DecodeWavTest, Float32RoundTrip) {
  Rng rng(3);
  std::vector<float> x(257);
  for (float& v : x) v = static_cast<float>(rng.Uniform(-1, 1));
  AudioClip clip = DecodeWav(EncodeWav({x}, 44100, WavEncoding::kFloat32));
  EXPECT_EQ(clip.samples, x);
}

TEST(DecodeWavTest, MuLawIsUnsupported) {
  std::vector<uint8_t> wav = EncodeWav({{0.1f, 0.2f}}, 8000, WavEncoding::kPcm16);
  wav[20] = 7;   // format tag: mu-law
  wav[34] = 8;   // bits per sample
  wav[32] = 1;   // block align
  EXPECT_EQ(CodeOf([&] { DecodeWav(wav); }), ErrorCode::kUnsupportedEncoding);
}

TEST(DecodeWavTest, MalformedInputs) {
  std::vector<uint8_t> wav = EncodeWav({{0.1f, 0.2f, 0.3f}}, 8000, WavEncoding::kPcm16);
  std::vector<uint8_t> truncated(wav.begin(), wav.end() - 3);
  EXPECT_EQ(CodeOf([&] { DecodeWav(truncated); }), ErrorCode::kDecodeError);
  std::vector<uint8_t> junk = {'R', 'I', 'F', 'X', 0, 0};
  EXPECT_EQ(CodeOf([&] { DecodeWav(junk); }), ErrorCode::kDecodeError);
  std::vector<uint8_t> three = EncodeWav({{0.f}, {0.f}, {0.f}}, 8000, WavEncoding::kPcm16);
  EXPECT_EQ(CodeOf([&] { DecodeWav(three); }), ErrorCode::kUnsupportedEncoding);
}

TEST(ResampleTest, SameRateIsIdentity) {
  AudioClip clip{Sine(300, 16000, 1000), 16000};
  EXPECT_EQ(Resample(clip).samples, clip.samples);
}

TEST(ResampleTest, OutputLengths) {
  EXPECT_EQ(Resample({std::vector<float>(8000), 8000}).samples.size(), 16000u);
  EXPECT_EQ(Resample({std::vector<float>(44100), 44100}).samples.size(), 16000u);
  // round(1001 * 16000 / 22050) = round(726.3) = 726
  EXPECT_EQ(Resample({std::vector<float>(1001), 22050}).samples.size(), 726u);
  EXPECT_EQ(Resample({std::vector<float>(3), 48000}).samples.size(), 1u);
}

TEST(ResampleTest, ToneSurvivesDownsampling) {
  AudioClip clip{Sine(440, 44100, 44100), 44100};
  AudioClip out = Resample(clip);
  ASSERT_EQ(out.sample_rate, 16000);
  ASSERT_EQ(out.samples.size(), 16000u);
  // Steady-state window away from the edges: exactly 440 cycles per second,
  // so 8000 samples hold 220 whole cycles.
  std::vector<double> mid(out.samples.begin() + 4000, out.samples.begin() + 12000);
  const int n = static_cast<int>(mid.size());
  int best = 0;
  double best_mag = 0;
  for (int k = 200; k < 240; ++k) {
    const double m = DftMagnitude(mid, k, n);
    if (m > best_mag) best_mag = m, best = k;
  }
  EXPECT_NEAR(best, 220, 1);  // 440 Hz at 2 Hz per bin
  const double amplitude = 2.0 * best_mag / n;
  EXPECT_NEAR(amplitude, 1.0, 0.01);
}

TEST(ResampleTest, ToneSurvivesUpsampling) {
  AudioClip out = Resample({Sine(1000, 8000, 8000, 0.5), 8000});
  ASSERT_EQ(out.samples.size(), 16000u);
  double worst = 0;
  for (size_t i = 2000; i < 14000; ++i) {
    worst = std::max(worst, std::fabs(out.samples[i] - 0.5 * std::sin(2 * kPi * 1000 * i / 16000.0)));
  }
  EXPECT_LT(worst, 0.005);
}

TEST(ResampleTest, LargePrimeRatio) {
  // 16001 Hz: 16000 phases, computed per output sample.
  AudioClip out = Resample({Sine(500, 16001, 16001, 0.5), 16001});
  ASSERT_EQ(out.samples.size(), 16000u);
  for (size_t i = 1000; i < 15000; i += 97) {
    EXPECT_NEAR(out.samples[i], 0.5 * std::sin(2 * kPi * 500 * i / 16000.0), 0.005);
  }
}

TEST(TrimSilenceTest, AllZeroIsEmpty) {
  EXPECT_EQ(CodeOf([] { TrimSilence({std::vector<float>(16000), 16000}, 0.01); }),
            ErrorCode::kEmptyAfterTrim);
}

TEST(TrimSilenceTest, ZeroThresholdIsIdentity) {
  AudioClip clip{std::vector<float>(16123), 16000};
  clip.samples[5000] = 0.3f;
  EXPECT_EQ(TrimSilence(clip, 0.0).samples, clip.samples);
}

TEST(TrimSilenceTest, SilenceThenTone) {
  std::vector<float> x(16000, 0.0f);
  std::vector<float> tone = Sine(440, 16000, 16000);
  x.insert(x.end(), tone.begin(), tone.end());
  AudioClip out = TrimSilence({x, 16000}, 0.01);
  EXPECT_NEAR(out.duration(), 1.0, 0.025);
  // Order preserved: the result is the tone itself.
  EXPECT_EQ(out.samples, tone);
}

TEST(TrimSilenceTest, KeepsOrderOfLoudFrames) {
  std::vector<float> x(400 * 5, 0.0f);
  for (int i = 0; i < 400; ++i) x[400 + i] = 0.5f, x[1600 + i] = -0.25f;
  AudioClip out = TrimSilence({x, 16000}, 0.01);
  ASSERT_EQ(out.samples.size(), 800u);
  EXPECT_EQ(out.samples.front(), 0.5f);
  EXPECT_EQ(out.samples.back(), -0.25f);
  EXPECT_EQ(CodeOf([&] { TrimSilence({x, 16000}, -1.0); }), ErrorCode::kConfigError);
}

TEST(FftTest, MatchesDirectDft) {
  Rng rng(11);
  std::vector<std::complex<double>> a(64);
  for (auto& v : a) v = {rng.Uniform(-1, 1), rng.Uniform(-1, 1)};
  std::vector<std::complex<double>> b = a;
  Fft(b);
  for (int k = 0; k < 64; ++k) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < 64; ++i) acc += a[i] * std::polar(1.0, -2 * kPi * k * i / 64);
    EXPECT_NEAR(std::abs(acc - b[k]), 0.0, 1e-9);
  }
}

TEST(StftTest, FrameCount) {
  // Enumerate frame starts independently of the closed form.
  for (size_t len : {400u, 401u, 559u, 560u, 16000u, 16161u}) {
    int starts = 0;
    for (size_t s = 0; s + 400 <= len; s += 160) ++starts;
    Tensor mag = StftMagnitude({std::vector<float>(len), 16000});
    EXPECT_EQ(mag.dim(0), starts) << len;
    EXPECT_EQ(mag.dim(1), 257);
  }
  EXPECT_EQ(StftMagnitude({std::vector<float>(16000), 16000}).dim(0), 98);
}

TEST(StftTest, SilenceIsZero) {
  Tensor mag = StftMagnitude({std::vector<float>(16000), 16000});
  for (float v : mag.data()) ASSERT_EQ(v, 0.0f);
}

TEST(StftTest, Errors) {
  EXPECT_EQ(CodeOf([] { StftMagnitude({std::vector<float>(399), 16000}); }), ErrorCode::kTooShort);
  EXPECT_EQ(CodeOf([] { StftMagnitude({std::vector<float>(800), 8000}); }), ErrorCode::kConfigError);
}

TEST(StftTest, ToneMatchesBruteForceDft) {
  std::vector<float> x = Sine(1000, 16000, 4000);
  Tensor mag = StftMagnitude({x, 16000});
  const auto m = mag.data();
  for (int64_t f = 0; f < mag.dim(0); f += 5) {
    std::vector<double> frame = HannFrame(x, static_cast<size_t>(f * 160));
    int peak = 0;
    for (int k = 0; k < 257; ++k) {
      if (m[f * 257 + k] > m[f * 257 + peak]) peak = k;
      const double ref = DftMagnitude(frame, k, 512);
      if (ref > 1e-3) EXPECT_NEAR(m[f * 257 + k] / ref, 1.0, 1e-4) << f << " " << k;
    }
    EXPECT_EQ(peak, 32);
  }
}

TEST(StftTest, RandomClipMatchesBruteForceDft) {
  Rng rng(5);
  std::vector<float> x(1200);
  for (float& v : x) v = static_cast<float>(rng.Uniform(-1, 1));
  Tensor mag = StftMagnitude({x, 16000});
  ASSERT_EQ(mag.dim(0), 6);
  for (int64_t f = 0; f < 6; ++f) {
    std::vector<double> frame = HannFrame(x, static_cast<size_t>(f * 160));
    for (int k = 0; k < 257; ++k) {
      const double ref = DftMagnitude(frame, k, 512);
      EXPECT_NEAR(mag.data()[f * 257 + k], ref, 1e-4 * std::max(ref, 1.0));
    }
  }
}

TEST(StftTest, ParsevalEnergy) {
  Rng rng(8);
  std::vector<float> x(400);
  for (float& v : x) v = static_cast<float>(rng.Uniform(-1, 1));
  Tensor mag = StftMagnitude({x, 16000});
  std::vector<double> frame = HannFrame(x, 0);
  double time_energy = 0;
  for (double v : frame) time_energy += v * v;
  // One-sided spectrum: DC and Nyquist once, other bins twice.
  double freq_energy = 0;
  for (int k = 0; k < 257; ++k) {
    const double e = double(mag.data()[k]) * mag.data()[k];
    freq_energy += (k == 0 || k == 256) ? e : 2 * e;
  }
  EXPECT_NEAR(freq_energy / 512.0 / time_energy, 1.0, 1e-4);
}

TEST(MelTest, ScaleValues) {
  EXPECT_EQ(HzToMel(0.0), 0.0);
  EXPECT_NEAR(HzToMel(700.0), 781.17, 0.005);
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-12);
}

TEST(MelTest, OutOfBandBinsContributeNothing) {
  const Tensor& w = MelWeightMatrix();
  ASSERT_EQ(w.shape(), (Shape{257, 64}));
  for (int k = 0; k < 257; ++k) {
    const double hz = k * 16000.0 / 512.0;
    double row = 0;
    for (int b = 0; b < 64; ++b) row += w.data()[k * 64 + b];
    if (hz <= 125.0 || hz >= 7500.0) EXPECT_EQ(row, 0.0) << k;
  }
  Tensor ones = Tensor::Filled({1, 257}, 1.0f);
  Tensor mel = MelFilterbank(ones);
  ASSERT_EQ(mel.shape(), (Shape{1, 64}));
  for (float v : mel.data()) EXPECT_GT(v, 0.0f);
}

TEST(MelTest, TrianglesPeakAtOne) {
  const Tensor& w = MelWeightMatrix();
  for (int b = 0; b < 64; ++b) {
    float peak = 0;
    for (int k = 0; k < 257; ++k) peak = std::max(peak, w.data()[k * 64 + b]);
    EXPECT_GT(peak, 0.0f);
    EXPECT_LE(peak, 1.0f);
  }
}

TEST(LogMelTest, Values) {
  Tensor out = LogMel(Tensor::FromData({1, 3}, {0.0f, 0.999f, 10.0f}));
  EXPECT_NEAR(out.data()[0], -6.907755, 1e-5);
  EXPECT_NEAR(out.data()[1], 0.0, 1e-6);
  EXPECT_NEAR(out.data()[2], std::log(10.001), 1e-5);
}

TEST(LogMelTest, Monotonic) {
  Rng rng(2);
  std::vector<float> v(500);
  for (float& x : v) x = static_cast<float>(rng.Uniform(0, 50));
  std::sort(v.begin(), v.end());
  Tensor out = LogMel(Tensor::FromData({500}, v));
  for (size_t i = 1; i < 500; ++i) EXPECT_LE(out.data()[i - 1], out.data()[i]);
}

TEST(FramePatchesTest, PatchCounts) {
  for (int64_t frames : {1, 10, 95, 96, 97, 98, 143, 144, 145, 191, 192, 500}) {
    int64_t starts = 0;
    for (int64_t s = 0; s == 0 || s + 96 <= frames; s += 48) ++starts;
    Tensor p = FramePatches(Tensor::Zeros({frames, 64}));
    EXPECT_EQ(p.shape(), (Shape{starts, 96, 64, 1})) << frames;
  }
  EXPECT_EQ(FramePatches(Tensor::Zeros({98, 64})).dim(0), 1);
  EXPECT_EQ(FramePatches(Tensor::Zeros({144, 64})).dim(0), 2);
}

TEST(FramePatchesTest, OverlapAndPadding) {
  std::vector<float> v(144 * 64);
  for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(i / 64);
  Tensor p = FramePatches(Tensor::FromData({144, 64}, v));
  EXPECT_EQ(p.data()[(0 * 96 + 50) * 64], 50.0f);
  EXPECT_EQ(p.data()[(1 * 96 + 0) * 64], 48.0f);
  EXPECT_EQ(p.data()[(1 * 96 + 95) * 64 + 63], 143.0f);

  Tensor short_one = FramePatches(Tensor::Filled({10, 64}, 2.0f));
  const float pad = static_cast<float>(std::log(0.001));
  for (int64_t t = 0; t < 96; ++t) {
    for (int b = 0; b < 64; ++b) {
      EXPECT_EQ(short_one.data()[t * 64 + b], t < 10 ? 2.0f : pad);
    }
  }
}

TEST(AudioPipelineTest, ShapesAndDeterminism) {
  std::vector<float> x = Sine(523.25, 22050, 22050 * 2, 0.4);
  std::vector<uint8_t> wav = EncodeWav({x, x}, 22050, WavEncoding::kPcm16);
  Tensor a = AudioToPatches(DecodeWav(wav), {});
  Tensor b = AudioToPatches(DecodeWav(wav), {});
  // 2 s at 16 kHz = 32000 samples -> 198 frames -> 3 patches.
  EXPECT_EQ(a.shape(), (Shape{3, 96, 64, 1}));
  EXPECT_TRUE(a == b);
  a.CheckFinite("patches");
}

TEST(AudioPipelineTest, ShortClipsArePadded) {
  Tensor p = AudioToPatches({Sine(300, 16000, 100, 0.5), 16000}, {});
  EXPECT_EQ(p.shape(), (Shape{1, 96, 64, 1}));
  p.CheckFinite("patches");
  AudioFrontendConfig no_trim{.trim = false};
  EXPECT_EQ(AudioToPatches({std::vector<float>(16000), 16000}, no_trim).shape(),
            (Shape{1, 96, 64, 1}));
  EXPECT_EQ(CodeOf([] { AudioToPatches({std::vector<float>(16000), 16000}, {}); }),
            ErrorCode::kEmptyAfterTrim);
}

}  // namespace
}  // namespace ttml
