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

#ifndef DFD_IMAGE_HPP_
#define DFD_IMAGE_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace dfd {

/// Radiometrically linear H x W x C raster, row-major with interleaved
/// channels. Values are held in double precision in memory; files store
/// float32 (see image_io.hpp).
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int height, int width, int channels, double fill = 0.0);
  ImageBuffer(int height, int width, int channels, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x, int c = 0) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const ImageBuffer& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  /// Throws DomainError if any value is negative or non-finite.
  void validate() const;

  double mean() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 1;
  std::vector<double> data_;
};

/// H x W raster of metric (or relative) depth. Zero marks a missing value.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int height, int width, double fill = 0.0);
  DepthMap(int height, int width, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const DepthMap& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool same_shape(const ImageBuffer& image) const {
    return height_ == image.height() && width_ == image.width();
  }

  double min_valid() const;
  double max_valid() const;
  std::size_t valid_count() const;

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Squared L2 distance, sum over every sample.
double squared_distance(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace dfd

#endif  // DFD_IMAGE_HPP_
