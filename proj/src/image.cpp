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

#include "dfd/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dfd/errors.hpp"

namespace dfd {

namespace {

void check_dims(int height, int width) {
  if (height <= 0 || width <= 0) {
    throw ShapeError("raster dimensions must be positive, got " + std::to_string(height) +
                     "x" + std::to_string(width));
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width);
  if (channels != 1 && channels != 3) throw ShapeError("images must have 1 or 3 channels");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ImageBuffer::ImageBuffer(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width);
  if (channels != 1 && channels != 3) throw ShapeError("images must have 1 or 3 channels");
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw ShapeError("image data length does not match height*width*channels");
  }
}

void ImageBuffer::validate() const {
  for (double v : data_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError("image values must be finite and non-negative");
    }
  }
}

double ImageBuffer::mean() const {
  if (data_.empty()) return 0.0;
  double sum = 0.0;
  for (double v : data_) sum += v;
  return sum / static_cast<double>(data_.size());
}

DepthMap::DepthMap(int height, int width, double fill) : height_(height), width_(width) {
  check_dims(height, width);
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

DepthMap::DepthMap(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  check_dims(height, width);
  if (data_.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeError("depth data length does not match height*width");
  }
}

double DepthMap::min_valid() const {
  double lo = std::numeric_limits<double>::infinity();
  for (double v : data_) {
    if (v > 0.0) lo = std::min(lo, v);
  }
  return lo;
}

double DepthMap::max_valid() const {
  double hi = 0.0;
  for (double v : data_) hi = std::max(hi, v);
  return hi;
}

std::size_t DepthMap::valid_count() const {
  return static_cast<std::size_t>(std::count_if(data_.begin(), data_.end(), [](double v) { return v > 0.0; }));
}

double squared_distance(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b)) throw ShapeError("squared_distance: image shapes differ");
  double sum = 0.0;
  const auto av = a.data();
  const auto bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace dfd
