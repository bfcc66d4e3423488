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

#ifndef DFD_EVAL_HPP_
#define DFD_EVAL_HPP_

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <vector>

#include "dfd/image.hpp"

namespace dfd {

/// Pinhole intrinsics with optional Brown-Conrady distortion
/// (k1, k2, p1, p2, k3). Pixel (u, v) is column u, row v, centers at
/// integer coordinates.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  std::array<double, 5> distortion{};

  void validate() const;
  bool has_distortion() const;
  Eigen::Matrix3d matrix() const;
};

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  /// R^T R = I and det R = +1, both within 1e-9.
  void validate() const;
};

struct MetricsReport {
  double rmse = 0.0;
  double rel = 0.0;
  double log10 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  std::size_t valid_pixels = 0;
};

/// Depth metrics over pixels where both maps are nonzero.
/// Throws DomainError when that set is empty.
MetricsReport compute_metrics(const DepthMap& pred, const DepthMap& gt);

using PointCloud = std::vector<Eigen::Vector3d>;

/// depth(u, v) * K^-1 [u v 1]^T for every pixel with depth > 0.
PointCloud unproject(const DepthMap& depth, const Intrinsics& K);

PointCloud transform_points(const PointCloud& cloud, const RigidTransform& T);

struct Projection {
  DepthMap depth;
  std::size_t dropped = 0;  // points behind the camera or off-image
};

/// Nearest-pixel splatting with a z-buffer (smallest z wins). Points are
/// visited in order so ties resolve deterministically.
Projection project_depth(const PointCloud& cloud, const Intrinsics& K, int height, int width);

/// Removes lens distortion from a depth map by nearest-neighbour
/// resampling. Identity when K carries no distortion.
DepthMap undistort_depth(const DepthMap& depth, const Intrinsics& K);

/// Warps pred into the gt camera (unproject, transform, project) and
/// scores it on the nonzero intersection. gt is undistorted first when
/// gt_K has distortion coefficients.
MetricsReport evaluate_aligned(const DepthMap& pred, const Intrinsics& pred_K, const DepthMap& gt,
                               const Intrinsics& gt_K, const RigidTransform& T);

}  // namespace dfd

#endif  // DFD_EVAL_HPP_
