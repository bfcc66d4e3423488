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

#include "dfd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfd/errors.hpp"
#include "dfd/eval.hpp"
#include "dfd/grad.hpp"

namespace dfd {

namespace {

constexpr double kMaxLogit = 20.0;

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

void AffineScale::validate() const {
  if (!(s_min > 0.0) || !(s_max > s_min)) {
    throw DomainError("scene bounds must satisfy s_max > s_min > 0");
  }
}

AffineScale AffineScale::from_alpha_beta(double alpha0, double beta0, double s_min, double s_max) {
  AffineScale aff{0.0, 0.0, s_min, s_max};
  aff.validate();
  if (!(alpha0 > 0.0 && alpha0 < s_max)) {
    throw DomainError("alpha0 = " + std::to_string(alpha0) + " is outside (0, s_max)");
  }
  if (!(beta0 > 0.0 && beta0 < s_min)) {
    throw DomainError("beta0 = " + std::to_string(beta0) + " is outside (0, s_min)");
  }
  aff.a = std::clamp(logit(alpha0 / s_max), -kMaxLogit, kMaxLogit);
  aff.b = std::clamp(logit(beta0 / s_min), -kMaxLogit, kMaxLogit);
  return aff;
}

DepthMap metric_depth(const DepthMap& relative, const AffineScale& affine) {
  affine.validate();
  const double alpha = affine.alpha();
  const double beta = affine.beta();
  DepthMap out(relative.height(), relative.width());
  for (std::size_t i = 0; i < relative.size(); ++i) {
    const double r = relative[i];
    if (!(r >= 0.0 && r <= 1.0)) {
      throw DomainError("metric_depth: relative depth " + std::to_string(r) + " outside [0, 1]");
    }
    out[i] = alpha * r + beta;
  }
  return out;
}

Adam::Adam(std::size_t size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ShapeError("Adam::step: size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

void SolveConfig::validate() const {
  if (iters < 1) throw DomainError("iters must be >= 1");
  if (!(lr_prior > 0.0) || !(lr_affine > 0.0)) throw DomainError("learning rates must be > 0");
  if (!(tv_weight >= 0.0)) throw DomainError("tv_weight must be >= 0");
  psf_model.validate();
}

ObjectiveTerms objective(const CapturePair& pair, const DepthMap& depth, const SolveConfig& cfg,
                         const DepthMap* relative) {
  pair.validate();
  ObjectiveTerms terms;
  const ImageBuffer pred = render_blur(pair.aif.image, depth, pair.blurred.camera, cfg.psf_model);
  terms.data = squared_distance(pred, pair.blurred.image);
  if (relative != nullptr) terms.tv = tv_penalty(*relative, cfg.tv_weight).value;
  return terms;
}

SolveResult solve(const CapturePair& pair, const DepthParameterization& prior,
                  std::span<const double> init_params, const AffineScale& aff0, const SolveConfig& cfg,
                  const StepCallback& on_step) {
  pair.validate();
  cfg.validate();
  aff0.validate();
  if (init_params.size() != prior.param_dim()) {
    throw ShapeError("solve: init_params has " + std::to_string(init_params.size()) +
                     " entries, prior expects " + std::to_string(prior.param_dim()));
  }
  if (prior.height() != pair.aif.image.height() || prior.width() != pair.aif.image.width()) {
    throw ShapeError("solve: prior resolution does not match the captures");
  }

  DefocusRenderer renderer(pair.aif.image, pair.blurred.camera, cfg.psf_model);
  const ImageBuffer& observed = pair.blurred.image;
  // Keep the rendered depth strictly above the near-field floor.
  const double depth_floor = pair.blurred.camera.min_depth() * (1.0 + 1e-9);

  std::vector<double> params(init_params.begin(), init_params.end());
  std::vector<double> affine{aff0.a, aff0.b};
  Adam prior_opt(params.size(), cfg.lr_prior, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  Adam affine_opt(2, cfg.lr_affine, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);

  SolveResult best;
  best.best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  trace.reserve(cfg.iters);

  for (int it = 0; it < cfg.iters; ++it) {
    const AffineScale aff{affine[0], affine[1], aff0.s_min, aff0.s_max};
    const double alpha = aff.alpha();
    const double beta = aff.beta();

    const DepthMap rel = prior.decode(params);
    DepthMap depth = metric_depth(rel, aff);
    std::vector<bool> floored(depth.size(), false);
    for (std::size_t i = 0; i < depth.size(); ++i) {
      if (depth[i] <= depth_floor) {
        depth[i] = depth_floor;
        floored[i] = true;
      }
    }

    const ImageBuffer pred = renderer.render(depth);
    const LossAndGrad data = loss_and_grad(pred, observed);
    const TvPenalty tv = tv_penalty(rel, cfg.tv_weight);
    const double loss = data.loss + tv.value;
    if (!std::isfinite(loss)) {
      throw SolveError("solve: non-finite loss at iteration " + std::to_string(it));
    }
    trace.push_back(loss);

    if (loss < best.best_loss) {
      best.best_loss = loss;
      best.best_iter = it;
      best.params = params;
      best.affine = aff;
      best.relative_depth = rel;
      best.metric_depth = metric_depth(rel, aff);
      best.alpha = alpha;
      best.beta = beta;
    }

    DepthMap g_depth = renderer.vjp(data.grad);
    for (std::size_t i = 0; i < g_depth.size(); ++i) {
      if (floored[i]) g_depth[i] = 0.0;
    }

    if (!cfg.freeze_prior) {
      DepthMap g_rel(rel.height(), rel.width());
      for (std::size_t i = 0; i < g_rel.size(); ++i) g_rel[i] = alpha * g_depth[i] + tv.grad[i];
      const std::vector<double> g_params = prior.vjp(params, g_rel);
      prior_opt.step(params, g_params);
      if (prior.latent_like()) prior.renormalize(params);
    }

    double g_alpha = 0.0;
    double g_beta = 0.0;
    for (std::size_t i = 0; i < g_depth.size(); ++i) {
      g_alpha += g_depth[i] * rel[i];
      g_beta += g_depth[i];
    }
    const double sa = sigmoid(affine[0]);
    const double sb = sigmoid(affine[1]);
    const std::vector<double> g_affine{g_alpha * aff0.s_max * sa * (1.0 - sa),
                                       g_beta * aff0.s_min * sb * (1.0 - sb)};
    affine_opt.step(affine, g_affine);

    if (on_step) {
      const AffineScale next{affine[0], affine[1], aff0.s_min, aff0.s_max};
      on_step(IterationInfo{it, loss, params, next.alpha(), next.beta()});
    }
  }

  best.loss_trace = std::move(trace);
  best.iters_run = cfg.iters;
  return best;
}

std::vector<GridCell> grid_init_sweep(const CapturePair& pair, const DepthParameterization& prior,
                                      std::span<const double> params, const DepthMap& gt,
                                      const SolveConfig& cfg, double s_min, double s_max,
                                      std::span<const double> alpha_grid,
                                      std::span<const double> beta_grid) {
  if (alpha_grid.empty() || beta_grid.empty()) {
    throw DomainError("grid_init_sweep: grids must be nonempty");
  }
  SolveConfig frozen = cfg;
  frozen.freeze_prior = true;

  std::vector<GridCell> cells;
  cells.reserve(alpha_grid.size() * beta_grid.size());
  for (double alpha0 : alpha_grid) {
    for (double beta0 : beta_grid) {
      const AffineScale aff = AffineScale::from_alpha_beta(alpha0, beta0, s_min, s_max);
      const SolveResult r = solve(pair, prior, params, aff, frozen);
      const MetricsReport m = compute_metrics(r.metric_depth, gt);
      cells.push_back({alpha0, beta0, m.delta1, m.rmse, r.alpha, r.beta});
    }
  }
  return cells;
}

}  // namespace dfd
