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

#include "dfd/eval.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "dfd/errors.hpp"

namespace dfd {

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw DomainError("intrinsics: fx and fy must be > 0");
}

bool Intrinsics::has_distortion() const {
  return std::any_of(distortion.begin(), distortion.end(), [](double k) { return k != 0.0; });
}

Eigen::Matrix3d Intrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

void RigidTransform::validate() const {
  const double orth = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (orth > 1e-9) throw DomainError("rotation is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > 1e-9) throw DomainError("rotation determinant is not +1");
}

MetricsReport compute_metrics(const DepthMap& pred, const DepthMap& gt) {
  if (!pred.same_shape(gt)) throw ShapeError("compute_metrics: depth maps differ in shape");

  double sq = 0.0;
  double rel = 0.0;
  double lg = 0.0;
  std::size_t hits[3] = {0, 0, 0};
  std::size_t n = 0;
  const double thresholds[3] = {1.25, 1.25 * 1.25, 1.25 * 1.25 * 1.25};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double g = gt[i];
    const double p = pred[i];
    if (!(g > 0.0) || !(p > 0.0)) continue;
    const double diff = g - p;
    sq += diff * diff;
    rel += std::abs(diff) / g;
    lg += std::abs(std::log10(g) - std::log10(p));
    const double ratio = std::max(g / p, p / g);
    for (int k = 0; k < 3; ++k) {
      if (ratio < thresholds[k]) ++hits[k];
    }
    ++n;
  }
  if (n == 0) throw DomainError("compute_metrics: no pixel is valid in both maps");

  MetricsReport m;
  const double count = static_cast<double>(n);
  m.valid_pixels = n;
  m.rmse = std::sqrt(sq / count);
  m.rel = rel / count;
  m.log10 = lg / count;
  m.delta1 = static_cast<double>(hits[0]) / count;
  m.delta2 = static_cast<double>(hits[1]) / count;
  m.delta3 = static_cast<double>(hits[2]) / count;
  return m;
}

PointCloud unproject(const DepthMap& depth, const Intrinsics& K) {
  K.validate();
  const Eigen::Matrix3d k_inv = K.matrix().inverse();
  PointCloud cloud;
  cloud.reserve(depth.valid_count());
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const double d = depth.at(v, u);
      if (!(d > 0.0)) continue;
      Eigen::Vector3d p = d * (k_inv * Eigen::Vector3d(u, v, 1.0));
      p.z() = d;
      cloud.push_back(p);
    }
  }
  return cloud;
}

PointCloud transform_points(const PointCloud& cloud, const RigidTransform& T) {
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(T.rotation * p + T.translation);
  return out;
}

Projection project_depth(const PointCloud& cloud, const Intrinsics& K, int height, int width) {
  K.validate();
  Projection proj{DepthMap(height, width, 0.0), 0};
  for (const auto& p : cloud) {
    if (!(p.z() > 0.0)) {
      ++proj.dropped;
      continue;
    }
    const double u = K.fx * p.x() / p.z() + K.cx;
    const double v = K.fy * p.y() / p.z() + K.cy;
    const double ur = std::round(u);
    const double vr = std::round(v);
    if (!(ur >= 0.0 && ur < width && vr >= 0.0 && vr < height)) {
      ++proj.dropped;
      continue;
    }
    double& cell = proj.depth.at(static_cast<int>(vr), static_cast<int>(ur));
    if (cell == 0.0 || p.z() < cell) cell = p.z();
  }
  return proj;
}

DepthMap undistort_depth(const DepthMap& depth, const Intrinsics& K) {
  K.validate();
  if (!K.has_distortion()) return depth;
  const auto& [k1, k2, p1, p2, k3] = K.distortion;
  DepthMap out(depth.height(), depth.width(), 0.0);
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const double x = (u - K.cx) / K.fx;
      const double y = (v - K.cy) / K.fy;
      const double r2 = x * x + y * y;
      const double radial = 1.0 + r2 * (k1 + r2 * (k2 + r2 * k3));
      const double xd = x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x);
      const double yd = y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y;
      const double su = std::round(K.fx * xd + K.cx);
      const double sv = std::round(K.fy * yd + K.cy);
      if (su >= 0.0 && su < depth.width() && sv >= 0.0 && sv < depth.height()) {
        out.at(v, u) = depth.at(static_cast<int>(sv), static_cast<int>(su));
      }
    }
  }
  return out;
}

MetricsReport evaluate_aligned(const DepthMap& pred, const Intrinsics& pred_K, const DepthMap& gt,
                               const Intrinsics& gt_K, const RigidTransform& T) {
  T.validate();
  const DepthMap gt_u = undistort_depth(gt, gt_K);
  const PointCloud cloud = transform_points(unproject(pred, pred_K), T);
  const Projection warped = project_depth(cloud, gt_K, gt.height(), gt.width());
  return compute_metrics(warped.depth, gt_u);
}

}  // namespace dfd
