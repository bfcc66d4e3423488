// Copyright 2026 The dfd Authors. All Rights Reserved.
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

#include "dfd/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dfd/errors.hpp"

namespace dfd {

namespace fs = std::filesystem;

namespace {

struct PfmData {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<double> values;  // top-to-bottom, interleaved
};

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0x0000ff00u) | ((v << 8) & 0x00ff0000u) | (v << 24);
}

void write_pfm_raw(const fs::path& path, int height, int width, int channels,
                   std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  out << (channels == 3 ? "PF" : "Pf") << '\n' << width << ' ' << height << '\n' << "-1.0" << '\n';

  std::vector<float> row(static_cast<std::size_t>(width) * channels);
  for (int y = height - 1; y >= 0; --y) {
    const std::size_t base = static_cast<std::size_t>(y) * width * channels;
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<float>(values[base + i]);
    if constexpr (std::endian::native == std::endian::big) {
      for (auto& f : row) f = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(f)));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

PfmData read_pfm_raw(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path.string());

  std::string magic;
  in >> magic;
  PfmData pfm;
  if (magic == "PF") {
    pfm.channels = 3;
  } else if (magic == "Pf") {
    pfm.channels = 1;
  } else {
    throw FormatError("not a PFM file: " + path.string());
  }
  double scale = 0.0;
  in >> pfm.width >> pfm.height >> scale;
  if (!in || pfm.width <= 0 || pfm.height <= 0 || scale == 0.0) {
    throw FormatError("malformed PFM header: " + path.string());
  }
  in.get();  // single whitespace byte before the raster

  const bool little = scale < 0.0;
  const std::size_t count = static_cast<std::size_t>(pfm.width) * pfm.height * pfm.channels;
  std::vector<float> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(float))) {
    throw FormatError("truncated PFM raster: " + path.string());
  }
  const bool swap = little != (std::endian::native == std::endian::little);
  if (swap) {
    for (auto& f : raw) f = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(f)));
  }

  pfm.values.resize(count);
  const std::size_t row = static_cast<std::size_t>(pfm.width) * pfm.channels;
  for (int y = 0; y < pfm.height; ++y) {
    const std::size_t src = static_cast<std::size_t>(pfm.height - 1 - y) * row;
    const std::size_t dst = static_cast<std::size_t>(y) * row;
    for (std::size_t i = 0; i < row; ++i) pfm.values[dst + i] = raw[src + i];
  }
  return pfm;
}

struct PngFile {
  FILE* fp = nullptr;
  ~PngFile() {
    if (fp) std::fclose(fp);
  }
};

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct PngImage {
  int height = 0;
  int width = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;
};

PngImage read_png(const fs::path& path) {
  PngFile file;
  file.fp = std::fopen(path.string().c_str(), "rb");
  if (!file.fp) throw FormatError("cannot open: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("malformed PNG: " + path.string());
  }
  png_init_io(png, file.fp);
  png_read_info(png, info);

  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  if (png_get_bit_depth(png, info) == 16 && std::endian::native == std::endian::little) {
    png_set_swap(png);
  }
  png_read_update_info(png, info);

  PngImage img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.bit_depth = png_get_bit_depth(png, info);
  img.channels = png_get_channels(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<unsigned char> buffer(rowbytes * img.height);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  const int stored_channels = static_cast<int>(rowbytes / img.width / (img.bit_depth == 16 ? 2 : 1));
  img.samples.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        const std::size_t s = static_cast<std::size_t>(x) * stored_channels + c;
        std::uint16_t v;
        if (img.bit_depth == 16) {
          std::memcpy(&v, rows[y] + 2 * s, 2);
        } else {
          v = rows[y][s];
        }
        img.samples[(static_cast<std::size_t>(y) * img.width + x) * img.channels + c] = v;
      }
    }
  }
  return img;
}

}  // namespace

void write_pfm(const fs::path& path, const ImageBuffer& image) {
  write_pfm_raw(path, image.height(), image.width(), image.channels(), image.data());
}

void write_pfm(const fs::path& path, const DepthMap& depth) {
  write_pfm_raw(path, depth.height(), depth.width(), 1, depth.data());
}

ImageBuffer read_pfm_image(const fs::path& path) {
  PfmData pfm = read_pfm_raw(path);
  return ImageBuffer(pfm.height, pfm.width, pfm.channels, std::move(pfm.values));
}

DepthMap read_pfm_depth(const fs::path& path) {
  PfmData pfm = read_pfm_raw(path);
  if (pfm.channels != 1) throw FormatError("depth PFM must be single channel: " + path.string());
  return DepthMap(pfm.height, pfm.width, std::move(pfm.values));
}

void write_png16_depth(const fs::path& path, const DepthMap& depth) {
  PngFile file;
  file.fp = std::fopen(path.string().c_str(), "wb");
  if (!file.fp) throw FormatError("cannot open for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw FormatError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("PNG write failed: " + path.string());
  }
  png_init_io(png, file.fp);
  png_set_IHDR(png, info, depth.width(), depth.height(), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> row(static_cast<std::size_t>(depth.width()) * 2);
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const double mm = std::round(std::max(0.0, depth.at(y, x)) * 1000.0);
      const auto v = static_cast<std::uint16_t>(std::min(mm, 65535.0));
      row[2 * x] = static_cast<unsigned char>(v >> 8);  // PNG is big-endian
      row[2 * x + 1] = static_cast<unsigned char>(v & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

DepthMap read_png16_depth(const fs::path& path) {
  PngImage img = read_png(path);
  if (img.bit_depth != 16 || img.channels != 1) {
    throw FormatError("depth PNG must be 16-bit grayscale: " + path.string());
  }
  DepthMap depth(img.height, img.width);
  for (std::size_t i = 0; i < depth.size(); ++i) depth[i] = img.samples[i] / 1000.0;
  return depth;
}

double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

ImageBuffer read_png_image_linear(const fs::path& path) {
  PngImage img = read_png(path);
  if (img.channels != 1 && img.channels != 3) throw FormatError("unsupported PNG layout: " + path.string());
  const double full = img.bit_depth == 16 ? 65535.0 : 255.0;
  ImageBuffer out(img.height, img.width, img.channels);
  auto values = out.data();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = srgb_to_linear(img.samples[i] / full);
  return out;
}

DepthMap read_depth(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pfm") return read_pfm_depth(path);
  if (ext == ".png") return read_png16_depth(path);
  throw FormatError("unsupported depth format (want .pfm or .png): " + path.string());
}

ImageBuffer read_image(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pfm") return read_pfm_image(path);
  if (ext == ".png") return read_png_image_linear(path);
  throw FormatError("unsupported image format (want .pfm or .png): " + path.string());
}

}  // namespace dfd
