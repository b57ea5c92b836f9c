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

#include "image/image.h"

#include <csetjmp>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "common/error.h"

namespace ttml {
namespace {

// ---- PPM (binary P6)

class PpmReader {
 public:
  explicit PpmReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  int64_t NextInt() {
    SkipSpaceAndComments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      Fail(ErrorCode::kDecodeError, "ppm: malformed header");
    }
    int64_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1 << 24)) Fail(ErrorCode::kDecodeError, "ppm: header value too large");
    }
    return v;
  }

  size_t pos() const { return pos_; }
  void Advance() { ++pos_; }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 2;
};

RasterImage DecodePpm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    Fail(ErrorCode::kDecodeError, "ppm: not a binary (P6) file");
  }
  PpmReader r(bytes);
  RasterImage img;
  img.width = r.NextInt();
  img.height = r.NextInt();
  const int64_t maxval = r.NextInt();
  if (img.width <= 0 || img.height <= 0 || maxval <= 0) {
    Fail(ErrorCode::kDecodeError, "ppm: bad dimensions");
  }
  if (maxval > 255) Fail(ErrorCode::kUnsupportedFormat, "ppm: 16-bit samples are not supported");
  if (r.pos() >= bytes.size() || !std::isspace(bytes[r.pos()])) {
    Fail(ErrorCode::kDecodeError, "ppm: truncated header");
  }
  r.Advance();
  const size_t n = static_cast<size_t>(img.width * img.height * 3);
  if (bytes.size() - r.pos() < n) Fail(ErrorCode::kDecodeError, "ppm: truncated pixel data");
  img.pixels.assign(bytes.begin() + static_cast<ptrdiff_t>(r.pos()),
                    bytes.begin() + static_cast<ptrdiff_t>(r.pos() + n));
  if (maxval != 255) {
    for (uint8_t& p : img.pixels) {
      p = static_cast<uint8_t>(std::lround(std::min<int64_t>(p, maxval) * 255.0 / maxval));
    }
  }
  return img;
}

// ---- PNG via libpng's simplified API

RasterImage DecodePng(std::span<const uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    Fail(ErrorCode::kDecodeError, std::string("png: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  RasterImage img;
  img.width = image.width;
  img.height = image.height;
  img.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    Fail(ErrorCode::kDecodeError, "png: " + msg);
  }
  return img;
}

// ---- JPEG via libjpeg. Errors longjmp back into DecodeJpegRaw, which holds
// only trivially destructible locals.

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void JpegQuietMessage(j_common_ptr, int) {}

// Returns false and fills message on failure; out must be sized by caller
// after the header pass, so this runs in two phases.
bool DecodeJpegRaw(std::span<const uint8_t> bytes, std::vector<uint8_t>* out, int64_t* w,
                   int64_t* h, char* message) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = JpegErrorExit;
  err.mgr.emit_message = JpegQuietMessage;
  if (setjmp(err.jump)) {
    std::memcpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  *w = cinfo.output_width;
  *h = cinfo.output_height;
  out->resize(static_cast<size_t>(*w * *h * 3));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out->data() + static_cast<size_t>(cinfo.output_scanline) * (*w) * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  const long warnings = err.mgr.num_warnings;
  jpeg_destroy_decompress(&cinfo);
  if (warnings > 0) {
    std::snprintf(message, JMSG_LENGTH_MAX, "corrupt or truncated data");
    return false;
  }
  return true;
}

RasterImage DecodeJpeg(std::span<const uint8_t> bytes) {
  RasterImage img;
  char message[JMSG_LENGTH_MAX] = {0};
  if (!DecodeJpegRaw(bytes, &img.pixels, &img.width, &img.height, message)) {
    Fail(ErrorCode::kDecodeError, std::string("jpeg: ") + message);
  }
  return img;
}

// Continuous sample with edge clamping; (fy, fx) in pixel-index space.
double SampleBilinear(const RasterImage& img, double fy, double fx, int c) {
  fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
  fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
  const auto y0 = static_cast<int64_t>(std::floor(fy));
  const auto x0 = static_cast<int64_t>(std::floor(fx));
  const int64_t y1 = std::min(y0 + 1, img.height - 1);
  const int64_t x1 = std::min(x0 + 1, img.width - 1);
  const double ay = fy - y0, ax = fx - x0;
  const double p00 = img.at(y0, x0, c), p01 = img.at(y0, x1, c);
  const double p10 = img.at(y1, x0, c), p11 = img.at(y1, x1, c);
  const double top = p00 + ax * (p01 - p00);
  const double bottom = p10 + ax * (p11 - p10);
  return top + ay * (bottom - top);
}

}  // namespace

ImageFormat SniffImageFormat(std::span<const uint8_t> bytes) {
  static constexpr uint8_t kPng[] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPng, 8) == 0) return ImageFormat::kPng;
  if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff) {
    return ImageFormat::kJpeg;
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return ImageFormat::kPpm;
  Fail(ErrorCode::kUnsupportedFormat, "unrecognized image format");
}

RasterImage DecodeImage(std::span<const uint8_t> bytes, ImageFormat format) {
  switch (format) {
    case ImageFormat::kPpm: return DecodePpm(bytes);
    case ImageFormat::kPng: return DecodePng(bytes);
    case ImageFormat::kJpeg: return DecodeJpeg(bytes);
  }
  Fail(ErrorCode::kUnsupportedFormat, "unknown image format");
}

RasterImage DecodeImage(std::span<const uint8_t> bytes) {
  return DecodeImage(bytes, SniffImageFormat(bytes));
}

std::vector<uint8_t> EncodePpm(const RasterImage& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

std::vector<uint8_t> EncodePng(const RasterImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0, nullptr)) {
    Fail(ErrorCode::kInternal, std::string("png encode: ") + image.message);
  }
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels.data(), 0, nullptr)) {
    Fail(ErrorCode::kInternal, std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

Tensor ResizeBilinear(const RasterImage& img, int64_t height, int64_t width) {
  if (img.height < 1 || img.width < 1 ||
      img.pixels.size() != static_cast<size_t>(img.height * img.width * 3)) {
    Fail(ErrorCode::kDecodeError, "image has inconsistent dimensions");
  }
  Tensor out = Tensor::Zeros({1, height, width, 3});
  float* dst = out.mutable_data().data();
  const double sy = static_cast<double>(img.height) / static_cast<double>(height);
  const double sx = static_cast<double>(img.width) / static_cast<double>(width);
  for (int64_t y = 0; y < height; ++y) {
    const double fy = (static_cast<double>(y) + 0.5) * sy - 0.5;
    for (int64_t x = 0; x < width; ++x) {
      const double fx = (static_cast<double>(x) + 0.5) * sx - 0.5;
      for (int c = 0; c < 3; ++c) {
        dst[(y * width + x) * 3 + c] = static_cast<float>(SampleBilinear(img, fy, fx, c));
      }
    }
  }
  return out;
}

Tensor PreprocessImage(const RasterImage& img, int64_t height, int64_t width) {
  Tensor t = ResizeBilinear(img, height, width);
  for (float& v : t.mutable_data()) v = std::clamp(v / 255.0f, 0.0f, 1.0f);
  return t;
}

void AugmentConfig::Check() const {
  if (!(hflip_prob >= 0.0 && hflip_prob <= 1.0)) {
    Fail(ErrorCode::kConfigError, "hflip probability must lie in [0, 1]");
  }
  if (!(rotation_max_deg >= 0.0 && rotation_max_deg <= 180.0)) {
    Fail(ErrorCode::kConfigError, "rotation range must lie in [0, 180] degrees");
  }
  if (!(zoom_lo > 0.0 && zoom_lo <= 1.0 && zoom_hi >= 1.0 && zoom_lo <= zoom_hi)) {
    Fail(ErrorCode::kConfigError, "zoom range must satisfy 0 < lo <= 1 <= hi");
  }
}

RasterImage Augment(const RasterImage& img, const AugmentConfig& cfg, Rng& rng) {
  if (!cfg.enabled) return img;
  cfg.Check();
  const bool flip = rng.Uniform01() < cfg.hflip_prob;
  const double angle = rng.Uniform(-cfg.rotation_max_deg, cfg.rotation_max_deg);
  const double zoom = rng.Uniform(cfg.zoom_lo, cfg.zoom_hi);

  RasterImage out = img;
  if (flip) {
    for (int64_t y = 0; y < img.height; ++y) {
      for (int64_t x = 0; x < img.width; ++x) {
        for (int c = 0; c < 3; ++c) {
          out.pixels[(y * img.width + x) * 3 + c] = img.at(y, img.width - 1 - x, c);
        }
      }
    }
  }
  if (angle == 0.0 && zoom == 1.0) return out;

  // Inverse-map each output pixel center: undo zoom, then undo rotation.
  const RasterImage src = out;
  const double cy = static_cast<double>(img.height) / 2.0;
  const double cx = static_cast<double>(img.width) / 2.0;
  const double rad = angle * std::numbers::pi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  for (int64_t y = 0; y < img.height; ++y) {
    for (int64_t x = 0; x < img.width; ++x) {
      const double dy = (static_cast<double>(y) + 0.5 - cy) / zoom;
      const double dx = (static_cast<double>(x) + 0.5 - cx) / zoom;
      const double sy = cy + (-sn * dx + cs * dy) - 0.5;
      const double sx = cx + (cs * dx + sn * dy) - 0.5;
      for (int c = 0; c < 3; ++c) {
        const double v = SampleBilinear(src, sy, sx, c);
        out.pixels[(y * img.width + x) * 3 + c] =
            static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace ttml
