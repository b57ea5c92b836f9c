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

#ifndef TTML_IMAGE_IMAGE_H_
#define TTML_IMAGE_IMAGE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "common/rng.h"
#include "tensor/tensor.h"

namespace ttml {

// 8-bit RGB, row-major, pixels.size() == height * width * 3.
struct RasterImage {
  int64_t height = 0;
  int64_t width = 0;
  std::vector<uint8_t> pixels;

  uint8_t at(int64_t y, int64_t x, int c) const { return pixels[(y * width + x) * 3 + c]; }
  bool operator==(const RasterImage&) const = default;
};

enum class ImageFormat { kPpm, kPng, kJpeg };

// By magic bytes; throws kUnsupportedFormat for anything else.
ImageFormat SniffImageFormat(std::span<const uint8_t> bytes);

// Throws kDecodeError for malformed or truncated data.
RasterImage DecodeImage(std::span<const uint8_t> bytes, ImageFormat format);
RasterImage DecodeImage(std::span<const uint8_t> bytes);

std::vector<uint8_t> EncodePpm(const RasterImage& img);
std::vector<uint8_t> EncodePng(const RasterImage& img);

inline constexpr int64_t kImageSize = 224;

// Bilinear resize with half-pixel centers (edge clamped), values kept in
// 0..255. Output (1, height, width, 3).
Tensor ResizeBilinear(const RasterImage& img, int64_t height, int64_t width);

// Resize to height x width then scale by 1/255: float32 in [0, 1].
Tensor PreprocessImage(const RasterImage& img, int64_t height = kImageSize,
                       int64_t width = kImageSize);

struct AugmentConfig {
  bool enabled = false;
  double hflip_prob = 0.5;
  double rotation_max_deg = 15.0;
  double zoom_lo = 0.8;
  double zoom_hi = 1.25;
  uint64_t seed = 0;

  // Throws kConfigError when out of range.
  void Check() const;
};

// hflip (with probability), then rotation uniform in +-max degrees, then zoom
// uniform in [lo, hi], both about the image center with edge-replicate fill.
// Three values are drawn from rng on every enabled call, whatever the config,
// so streams stay aligned across configurations.
RasterImage Augment(const RasterImage& img, const AugmentConfig& cfg, Rng& rng);

}  // namespace ttml

#endif  // TTML_IMAGE_IMAGE_H_
