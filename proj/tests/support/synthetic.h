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

#ifndef TTML_TESTS_SUPPORT_SYNTHETIC_H_
#define TTML_TESTS_SUPPORT_SYNTHETIC_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "audio/audio.h"
#include "common/files.h"
#include "common/rng.h"
#include "image/image.h"

namespace ttml::testing {

// Two visually distinct classes: warm smooth gradients and cool striped
// textures, each with per-image random jitter.
inline const std::vector<std::string>& ImageClassNames() {
  static const std::vector<std::string> names = {"cool_stripes", "warm_gradient"};
  return names;
}

inline RasterImage SyntheticImage(int cls, Rng& rng, int64_t size = 64) {
  RasterImage img{size, size, std::vector<uint8_t>(static_cast<size_t>(size * size * 3))};
  const double base[2][3] = {{60, 90, 200}, {210, 110, 50}};
  double color[3];
  for (int c = 0; c < 3; ++c) color[c] = base[cls][c] + rng.Uniform(-25, 25);
  const double period = rng.Uniform(4, 9);
  const double phase = rng.Uniform(0, 2 * std::numbers::pi);
  const bool vertical = rng.Bernoulli(0.5);
  for (int64_t y = 0; y < size; ++y) {
    for (int64_t x = 0; x < size; ++x) {
      double shade;
      if (cls == 0) {
        const double t = static_cast<double>(vertical ? x : y);
        shade = 55.0 * std::sin(2 * std::numbers::pi * t / period + phase);
      } else {
        shade = 40.0 * (static_cast<double>(y) / static_cast<double>(size) - 0.5);
      }
      for (int c = 0; c < 3; ++c) {
        const double v = color[c] + shade + rng.Uniform(-8, 8);
        img.pixels[static_cast<size_t>((y * size + x) * 3 + c)] =
            static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return img;
}

// White noise, pure tone and square wave, then sawtooth and chirp for
// larger class counts.
inline const std::vector<std::string>& AudioClassNames() {
  static const std::vector<std::string> names = {"noise", "sine", "square", "sawtooth", "chirp"};
  return names;
}

inline std::vector<float> SyntheticClip(int cls, Rng& rng, double seconds, int rate) {
  const auto n = static_cast<size_t>(seconds * rate);
  std::vector<float> x(n);
  const double freq = rng.Uniform(220, 1760);
  const double amp = rng.Uniform(0.3, 0.7);
  for (size_t i = 0; i < n; ++i) {
    const double s = std::sin(2 * std::numbers::pi * freq * static_cast<double>(i) / rate);
    double v;
    const double t = static_cast<double>(i) / rate;
    if (cls == 0) v = rng.Uniform(-1, 1);
    else if (cls == 1) v = s;
    else if (cls == 2) v = s >= 0 ? 1.0 : -1.0;
    else if (cls == 3) v = 2.0 * (freq * t - std::floor(freq * t + 0.5));
    else v = std::sin(2 * std::numbers::pi * (freq * t + 1500.0 * t * t / seconds));
    x[i] = static_cast<float>(amp * v);
  }
  return x;
}

// root/{train,val}/<class>/NNN.png (or .ppm every third file).
inline void WriteImageDataset(const std::filesystem::path& root, int train_per_class, int val_per_class,
                              uint64_t seed, int64_t size = 64) {
  for (int cls = 0; cls < 2; ++cls) {
    for (const char* split : {"train", "val"}) {
      const int count = std::string(split) == "train" ? train_per_class : val_per_class;
      const auto dir = root / split / ImageClassNames()[static_cast<size_t>(cls)];
      std::filesystem::create_directories(dir);
      for (int i = 0; i < count; ++i) {
        Rng rng(DeriveSeed(seed, {static_cast<uint64_t>(cls), std::string(split) == "train" ? 0u : 1u,
                                  static_cast<uint64_t>(i)}));
        const RasterImage img = SyntheticImage(cls, rng, size);
        char name[32];
        const bool ppm = i % 3 == 2;
        std::snprintf(name, sizeof(name), "%03d.%s", i, ppm ? "ppm" : "png");
        WriteFileBytes(dir / name, ppm ? EncodePpm(img) : EncodePng(img));
      }
    }
  }
}

// root/{train,val}/<class>/NNN.wav as 16-bit PCM at `rate`.
inline void WriteAudioDataset(const std::filesystem::path& root, int train_per_class, int val_per_class,
                              uint64_t seed, double seconds = 2.0, int rate = 16000,
                              int classes = 3) {
  for (int cls = 0; cls < classes; ++cls) {
    for (const char* split : {"train", "val"}) {
      const int count = std::string(split) == "train" ? train_per_class : val_per_class;
      const auto dir = root / split / AudioClassNames()[static_cast<size_t>(cls)];
      std::filesystem::create_directories(dir);
      for (int i = 0; i < count; ++i) {
        Rng rng(DeriveSeed(seed, {static_cast<uint64_t>(cls), std::string(split) == "train" ? 0u : 1u,
                                  static_cast<uint64_t>(i)}));
        char name[32];
        std::snprintf(name, sizeof(name), "%03d.wav", i);
        WriteFileBytes(dir / name, EncodeWav({SyntheticClip(cls, rng, seconds, rate)}, rate, WavEncoding::kPcm16));
      }
    }
  }
}

}  // namespace ttml::testing

#endif  // TTML_TESTS_SUPPORT_SYNTHETIC_H_
