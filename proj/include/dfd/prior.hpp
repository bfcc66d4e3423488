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

#ifndef DFD_PRIOR_HPP_
#define DFD_PRIOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dfd/image.hpp"

namespace dfd {

double sigmoid(double x);

/// Differentiable map from a parameter vector to a relative depth map with
/// values in [0, 1].
///
/// Implementations are stateless with respect to the parameters: the
/// optimizer owns the vector and passes it in. A parameterization that
/// reports latent_like() is kept on the sphere of radius sqrt(param_dim())
/// after every optimizer step.
class DepthParameterization {
 public:
  virtual ~DepthParameterization() = default;

  virtual std::string name() const = 0;
  virtual int height() const = 0;
  virtual int width() const = 0;
  virtual std::size_t param_dim() const = 0;

  virtual DepthMap decode(std::span<const double> params) const = 0;

  /// Gradient with respect to params of <upstream, decode(params)>.
  virtual std::vector<double> vjp(std::span<const double> params, const DepthMap& upstream) const = 0;

  virtual bool latent_like() const { return false; }

  /// Projection applied after each optimizer step when latent_like().
  virtual void renormalize(std::vector<double>& params) const;

 protected:
  void check_params(std::span<const double> params) const;
};

/// One logit per pixel: decode = sigmoid(logits).
class PixelPrior final : public DepthParameterization {
 public:
  PixelPrior(int height, int width);

  std::string name() const override { return "pixel"; }
  int height() const override { return height_; }
  int width() const override { return width_; }
  std::size_t param_dim() const override { return static_cast<std::size_t>(height_) * width_; }
  DepthMap decode(std::span<const double> params) const override;
  std::vector<double> vjp(std::span<const double> params, const DepthMap& upstream) const override;

 private:
  int height_;
  int width_;
};

/// Coarse control grid, bilinearly upsampled (corner-aligned) to the image
/// size and squashed by a sigmoid. Optionally latent-like.
class GridPrior final : public DepthParameterization {
 public:
  GridPrior(int height, int width, int grid_height, int grid_width, bool latent_like = false);

  std::string name() const override { return "grid"; }
  int height() const override { return height_; }
  int width() const override { return width_; }
  int grid_height() const { return grid_height_; }
  int grid_width() const { return grid_width_; }
  std::size_t param_dim() const override {
    return static_cast<std::size_t>(grid_height_) * grid_width_;
  }
  DepthMap decode(std::span<const double> params) const override;
  std::vector<double> vjp(std::span<const double> params, const DepthMap& upstream) const override;
  bool latent_like() const override { return latent_like_; }

  /// Bilinear upsampling of the control grid, before the sigmoid.
  std::vector<double> upsample(std::span<const double> control) const;

 private:
  struct Tap {
    int lo;
    int hi;
    double t;
  };
  static std::vector<Tap> make_taps(int out, int in);

  int height_;
  int width_;
  int grid_height_;
  int grid_width_;
  bool latent_like_;
  std::vector<Tap> row_taps_;
  std::vector<Tap> col_taps_;
};

/// Rescales params to L2 norm sqrt(target_dim). Throws DomainError on a
/// zero-norm input.
std::vector<double> renormalize_latent(std::span<const double> params, std::size_t target_dim);

struct TvPenalty {
  double value = 0.0;
  DepthMap grad;
};

/// weight * sum(|d(y, x+1) - d(y, x)| + |d(y+1, x) - d(y, x)|) with its
/// subgradient (sign(0) = 0).
TvPenalty tv_penalty(const DepthMap& depth, double weight);

}  // namespace dfd

#endif  // DFD_PRIOR_HPP_
