// Copyright 2026 The segjudge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "segjudge/raster.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "segjudge/error.hpp"

namespace segjudge {

namespace fs = std::filesystem;

RgbImage::RgbImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::InvalidSpec, "negative raster dimensions");
  }
  data_.assign(3 * pixel_count(), fill);
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::InvalidSpec, "negative raster dimensions");
  }
  data_.assign(pixel_count(), fill);
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(ErrorCode::MissingFile, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoFailure, "short write to " + path.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot rename into " + path.string());
  }
}

namespace {

struct PngImageGuard {
  png_image image{};
  PngImageGuard() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImageGuard() { png_image_free(&image); }
  PngImageGuard(const PngImageGuard&) = delete;
  PngImageGuard& operator=(const PngImageGuard&) = delete;
};

void begin_read(PngImageGuard& guard, const std::vector<std::uint8_t>& bytes,
                const fs::path& path) {
  if (!png_image_begin_read_from_memory(&guard.image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::IoFailure,
                "not a readable PNG: " + path.string() + " (" + guard.image.message + ")");
  }
}

std::vector<std::uint8_t> finish_read(PngImageGuard& guard, png_uint_32 format,
                                      const fs::path& path) {
  guard.image.format = format;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(guard.image));
  // Black background for sources with alpha.
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&guard.image, &background, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure,
                "PNG decode failed: " + path.string() + " (" + guard.image.message + ")");
  }
  return pixels;
}

template <typename Image>
std::vector<std::uint8_t> encode(const Image& image, png_uint_32 format) {
  if (image.empty()) throw Error(ErrorCode::EmptyImage, "cannot encode empty raster");
  PngImageGuard guard;
  guard.image.width = static_cast<png_uint_32>(image.width());
  guard.image.height = static_cast<png_uint_32>(image.height());
  guard.image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&guard.image, nullptr, &size, 0,
                                 image.bytes().data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, std::string("PNG encode failed: ") + guard.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&guard.image, out.data(), &size, 0,
                                 image.bytes().data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, std::string("PNG encode failed: ") + guard.image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

RgbImage read_rgb_png(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  PngImageGuard guard;
  begin_read(guard, bytes, path);
  const int w = static_cast<int>(guard.image.width);
  const int h = static_cast<int>(guard.image.height);
  const auto pixels = finish_read(guard, PNG_FORMAT_RGB, path);
  RgbImage image(w, h);
  std::copy(pixels.begin(), pixels.end(), image.bytes().begin());
  return image;
}

GrayImage read_gray_png(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  PngImageGuard guard;
  begin_read(guard, bytes, path);
  const int w = static_cast<int>(guard.image.width);
  const int h = static_cast<int>(guard.image.height);
  GrayImage mask(w, h);
  if (guard.image.format & PNG_FORMAT_FLAG_COLOR) {
    const auto rgb = finish_read(guard, PNG_FORMAT_RGB, path);
    for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
      const std::uint8_t r = rgb[3 * i], g = rgb[3 * i + 1], b = rgb[3 * i + 2];
      if (r != g || g != b) {
        throw Error(ErrorCode::NonBinaryMask,
                    "color pixel in mask " + path.string());
      }
      mask.bytes()[i] = r;
    }
  } else {
    const auto gray = finish_read(guard, PNG_FORMAT_GRAY, path);
    std::copy(gray.begin(), gray.end(), mask.bytes().begin());
  }
  return mask;
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  return encode(image, PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  return encode(image, PNG_FORMAT_GRAY);
}

void write_png(const fs::path& path, const RgbImage& image) {
  write_file_atomic(path, encode_png(image));
}

void write_png(const fs::path& path, const GrayImage& image) {
  write_file_atomic(path, encode_png(image));
}

}  // namespace segjudge
