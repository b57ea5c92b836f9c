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

#ifndef TTML_AUDIO_AUDIO_H_
#define TTML_AUDIO_AUDIO_H_

#include <cstdint>
#include <span>
#include <vector>

#include "tensor/tensor.h"

namespace ttml {

// Mono float samples in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = 0;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Log-mel front-end constants (16 kHz input).
namespace audio {
inline constexpr int kSampleRate = 16000;
inline constexpr int kWindow = 400;        // 25 ms
inline constexpr int kHop = 160;           // 10 ms
inline constexpr int kFftSize = 512;
inline constexpr int kBins = kFftSize / 2 + 1;
inline constexpr int kMelBands = 64;
inline constexpr double kMelLowHz = 125.0;
inline constexpr double kMelHighHz = 7500.0;
inline constexpr double kLogOffset = 0.001;
inline constexpr int kPatchFrames = 96;
inline constexpr int kPatchHop = 48;
inline constexpr double kTrimFrameSeconds = 0.025;
inline constexpr double kDefaultSilenceRms = 0.01;
}  // namespace audio

// RIFF/WAVE with PCM16 or IEEE float32 samples, one or two channels (stereo
// is averaged). Throws kDecodeError or kUnsupportedEncoding.
AudioClip DecodeWav(std::span<const uint8_t> bytes);

enum class WavEncoding { kPcm16, kFloat32 };

// channels[c][i]; all channels must have equal length.
std::vector<uint8_t> EncodeWav(const std::vector<std::vector<float>>& channels, int sample_rate,
                               WavEncoding encoding);

// Windowed-sinc (Kaiser) polyphase resampler. Output length is
// round(len * target / source).
AudioClip Resample(const AudioClip& clip, int target_rate = audio::kSampleRate);

// Keeps the frames of frame_seconds whose RMS >= threshold_rms, in order.
// Throws kEmptyAfterTrim when no frame survives.
AudioClip TrimSilence(const AudioClip& clip, double threshold_rms,
                      double frame_seconds = audio::kTrimFrameSeconds);

// Periodic-Hann 400-sample windows, hop 160, zero-padded to 512 points.
// Returns magnitudes (frames, 257), frames = 1 + (len - 400) / 160.
// Throws kTooShort below 400 samples or kConfigError if not 16 kHz.
Tensor StftMagnitude(const AudioClip& clip);

// HTK mel scale.
double HzToMel(double hz);

// (257, 64) triangular weights between 125 Hz and 7500 Hz.
const Tensor& MelWeightMatrix();

// (frames, 257) -> (frames, 64)
Tensor MelFilterbank(const Tensor& magnitudes);

// ln(mel + 0.001)
Tensor LogMel(const Tensor& mel);

// (frames, 64) -> (P, 96, 64, 1), hop 48; short inputs are padded with
// ln(0.001) to a single patch.
Tensor FramePatches(const Tensor& log_mel);

struct AudioFrontendConfig {
  bool trim = true;
  double silence_threshold = audio::kDefaultSilenceRms;
};

// resample -> trim -> (pad to one window) -> STFT -> mel -> log -> patches.
Tensor AudioToPatches(const AudioClip& clip, const AudioFrontendConfig& cfg);

}  // namespace ttml

#endif  // TTML_AUDIO_AUDIO_H_
