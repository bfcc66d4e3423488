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

#include "dfd/prior.hpp"

#include <cmath>

#include "dfd/errors.hpp"

namespace dfd {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void DepthParameterization::check_params(std::span<const double> params) const {
  if (params.size() != param_dim()) {
    throw ShapeError(name() + " prior expects " + std::to_string(param_dim()) + " parameters, got " +
                     std::to_string(params.size()));
  }
}

void DepthParameterization::renormalize(std::vector<double>& params) const {
  params = renormalize_latent(params, param_dim());
}

PixelPrior::PixelPrior(int height, int width) : height_(height), width_(width) {
  if (height <= 0 || width <= 0) throw ShapeError("PixelPrior: dimensions must be positive");
}

DepthMap PixelPrior::decode(std::span<const double> params) const {
  check_params(params);
  DepthMap out(height_, width_);
  for (std::size_t i = 0; i < params.size(); ++i) out[i] = sigmoid(params[i]);
  return out;
}

std::vector<double> PixelPrior::vjp(std::span<const double> params, const DepthMap& upstream) const {
  check_params(params);
  if (upstream.height() != height_ || upstream.width() != width_) {
    throw ShapeError("PixelPrior::vjp: upstream shape mismatch");
  }
  std::vector<double> g(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double s = sigmoid(params[i]);
    g[i] = upstream[i] * s * (1.0 - s);
  }
  return g;
}

GridPrior::GridPrior(int height, int width, int grid_height, int grid_width, bool latent_like)
    : height_(height),
      width_(width),
      grid_height_(grid_height),
      grid_width_(grid_width),
      latent_like_(latent_like) {
  if (height <= 0 || width <= 0 || grid_height <= 0 || grid_width <= 0) {
    throw ShapeError("GridPrior: dimensions must be positive");
  }
  row_taps_ = make_taps(height, grid_height);
  col_taps_ = make_taps(width, grid_width);
}

std::vector<GridPrior::Tap> GridPrior::make_taps(int out, int in) {
  std::vector<Tap> taps(out);
  for (int i = 0; i < out; ++i) {
    const double pos = out > 1 ? static_cast<double>(i) * (in - 1) / (out - 1) : 0.0;
    int lo = static_cast<int>(std::floor(pos));
    lo = std::min(lo, in - 1);
    const int hi = std::min(lo + 1, in - 1);
    taps[i] = {lo, hi, pos - lo};
  }
  return taps;
}

std::vector<double> GridPrior::upsample(std::span<const double> control) const {
  check_params(control);
  std::vector<double> out(static_cast<std::size_t>(height_) * width_);
  for (int y = 0; y < height_; ++y) {
    const Tap& ry = row_taps_[y];
    for (int x = 0; x < width_; ++x) {
      const Tap& rx = col_taps_[x];
      const double v00 = control[ry.lo * grid_width_ + rx.lo];
      const double v01 = control[ry.lo * grid_width_ + rx.hi];
      const double v10 = control[ry.hi * grid_width_ + rx.lo];
      const double v11 = control[ry.hi * grid_width_ + rx.hi];
      const double top = v00 + rx.t * (v01 - v00);
      const double bottom = v10 + rx.t * (v11 - v10);
      out[static_cast<std::size_t>(y) * width_ + x] = top + ry.t * (bottom - top);
    }
  }
  return out;
}

DepthMap GridPrior::decode(std::span<const double> params) const {
  std::vector<double> up = upsample(params);
  for (double& v : up) v = sigmoid(v);
  return DepthMap(height_, width_, std::move(up));
}

std::vector<double> GridPrior::vjp(std::span<const double> params, const DepthMap& upstream) const {
  if (upstream.height() != height_ || upstream.width() != width_) {
    throw ShapeError("GridPrior::vjp: upstream shape mismatch");
  }
  const std::vector<double> up = upsample(params);
  std::vector<double> g(param_dim(), 0.0);
  for (int y = 0; y < height_; ++y) {
    const Tap& ry = row_taps_[y];
    for (int x = 0; x < width_; ++x) {
      const Tap& rx = col_taps_[x];
      const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
      const double s = sigmoid(up[i]);
      const double gi = upstream[i] * s * (1.0 - s);
      g[ry.lo * grid_width_ + rx.lo] += gi * (1.0 - ry.t) * (1.0 - rx.t);
      g[ry.lo * grid_width_ + rx.hi] += gi * (1.0 - ry.t) * rx.t;
      g[ry.hi * grid_width_ + rx.lo] += gi * ry.t * (1.0 - rx.t);
      g[ry.hi * grid_width_ + rx.hi] += gi * ry.t * rx.t;
    }
  }
  return g;
}

std::vector<double> renormalize_latent(std::span<const double> params, std::size_t target_dim) {
  double sq = 0.0;
  for (double v : params) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("renormalize_latent: parameter vector has zero or non-finite norm");
  }
  const double k = std::sqrt(static_cast<double>(target_dim)) / norm;
  std::vector<double> out(params.begin(), params.end());
  for (double& v : out) v *= k;
  return out;
}

TvPenalty tv_penalty(const DepthMap& depth, double weight) {
  if (weight < 0.0) throw DomainError("tv_penalty: weight must be >= 0");
  TvPenalty tv{0.0, DepthMap(depth.height(), depth.width(), 0.0)};
  auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  const int h = depth.height();
  const int w = depth.width();
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) {
        const double d = depth.at(y, x + 1) - depth.at(y, x);
        sum += std::abs(d);
        tv.grad.at(y, x + 1) += weight * sign(d);
        tv.grad.at(y, x) -= weight * sign(d);
      }
      if (y + 1 < h) {
        const double d = depth.at(y + 1, x) - depth.at(y, x);
        sum += std::abs(d);
        tv.grad.at(y + 1, x) += weight * sign(d);
        tv.grad.at(y, x) -= weight * sign(d);
      }
    }
  }
  tv.value = weight * sum;
  return tv;
}

}  // namespace dfd
