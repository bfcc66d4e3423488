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

#ifndef DFD_SOLVER_HPP_
#define DFD_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dfd/image.hpp"
#include "dfd/optics.hpp"
#include "dfd/prior.hpp"
#include "dfd/render.hpp"

namespace dfd {

/// Bounded affine map from relative to metric depth:
///   alpha = s_max * sigmoid(a),  beta = s_min * sigmoid(b),
///   metric = alpha * relative + beta.
struct AffineScale {
  double a = 0.0;
  double b = 0.0;
  double s_min = 1.49;
  double s_max = 3.5;

  double alpha() const { return s_max * sigmoid(a); }
  double beta() const { return s_min * sigmoid(b); }

  /// Requires s_max > s_min > 0.
  void validate() const;

  /// Inverts the sigmoids so that alpha() == alpha0 and beta() == beta0,
  /// with |a|, |b| clamped to 20. Throws DomainError when alpha0 is not in
  /// (0, s_max) or beta0 is not in (0, s_min).
  static AffineScale from_alpha_beta(double alpha0, double beta0, double s_min, double s_max);

  friend bool operator==(const AffineScale&, const AffineScale&) = default;
};

/// Elementwise alpha * rel + beta. Throws DomainError when rel leaves [0, 1].
DepthMap metric_depth(const DepthMap& relative, const AffineScale& affine);

/// Hand-rolled Adam with bias correction.
class Adam {
 public:
  Adam(std::size_t size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);
  int steps_taken() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  int t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct SolveConfig {
  int iters = 200;
  double lr_prior = 1.5e-3;
  double lr_affine = 5e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double tv_weight = 1e-3;
  PsfModel psf_model;
  std::uint64_t seed = 0;
  bool freeze_prior = false;  // optimize a, b only

  void validate() const;
};

struct IterationInfo {
  int iter = 0;
  double loss = 0.0;
  std::span<const double> params;  // after the step (and any renormalization)
  double alpha = 0.0;
  double beta = 0.0;
};

struct SolveResult {
  DepthMap metric_depth;
  DepthMap relative_depth;
  double alpha = 0.0;
  double beta = 0.0;
  AffineScale affine;
  std::vector<double> params;
  std::vector<double> loss_trace;
  int iters_run = 0;
  int best_iter = 0;
  double best_loss = 0.0;

  friend bool operator==(const SolveResult&, const SolveResult&) = default;
};

struct ObjectiveTerms {
  double data = 0.0;
  double tv = 0.0;
  double total() const { return data + tv; }
};

/// ||x_b - g(x, depth)||^2 for an energy-normalized pair, plus
/// cfg.tv_weight * TV(relative) when a relative map is given.
ObjectiveTerms objective(const CapturePair& pair, const DepthMap& depth, const SolveConfig& cfg,
                         const DepthMap* relative = nullptr);

using StepCallback = std::function<void(const IterationInfo&)>;

/// Adam over the prior parameters and (a, b), minimizing objective().
///
/// The pair must already be energy-normalized. Metric depths at or below
/// the camera's near-field floor are clamped to just above it for
/// rendering and receive no gradient. Returns the iterate with the lowest
/// loss; throws SolveError on a non-finite loss.
SolveResult solve(const CapturePair& pair, const DepthParameterization& prior,
                  std::span<const double> init_params, const AffineScale& aff0, const SolveConfig& cfg,
                  const StepCallback& on_step = {});

struct GridCell {
  double alpha0 = 0.0;
  double beta0 = 0.0;
  double delta1 = 0.0;
  double rmse = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// For each (alpha0, beta0) pair, starts (a, b) at the sigmoid preimages and
/// solves with the prior parameters frozen at `params`; scores against gt.
/// Rows are ordered alpha-major.
std::vector<GridCell> grid_init_sweep(const CapturePair& pair, const DepthParameterization& prior,
                                      std::span<const double> params, const DepthMap& gt,
                                      const SolveConfig& cfg, double s_min, double s_max,
                                      std::span<const double> alpha_grid,
                                      std::span<const double> beta_grid);

}  // namespace dfd

#endif  // DFD_SOLVER_HPP_
