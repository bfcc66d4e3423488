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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dfd/errors.hpp"
#include "dfd/scenes.hpp"
#include "dfd/solver.hpp"
#include "test_util.hpp"

namespace dfd {
namespace {

using testing::reference_camera;

CapturePair plane_pair(double depth_m, int size = 16) {
  SceneSpec spec;
  spec.kind = SceneKind::TexturedPlane;
  spec.height = size;
  spec.width = size;
  spec.plane_depth = depth_m;
  spec.seed = 3;
  const Scene scene = make_scene(spec);
  const CameraConfig aif_cam = reference_camera(22.0);
  const CaptureSet set = simulate_captures(scene.aif, scene.depth, aif_cam, std::vector<double>{8.0}, PsfModel::disc());
  return normalize_capture(make_pair(set, 0));
}

TEST(Affine, RoundTripsAlphaBeta) {
  const AffineScale aff = AffineScale::from_alpha_beta(1.2, 0.7, 1.49, 3.5);
  EXPECT_NEAR(aff.alpha(), 1.2, 1e-12);
  EXPECT_NEAR(aff.beta(), 0.7, 1e-12);
  EXPECT_THROW(AffineScale::from_alpha_beta(3.5, 0.7, 1.49, 3.5), DomainError);
  EXPECT_THROW(AffineScale::from_alpha_beta(1.0, 0.0, 1.49, 3.5), DomainError);
  EXPECT_THROW(AffineScale::from_alpha_beta(1.0, 0.5, 2.0, 1.0), DomainError);
}

TEST(Affine, LogitsAreClamped) {
  const AffineScale aff = AffineScale::from_alpha_beta(3.5 * (1.0 - 1e-12), 1e-12, 1.49, 3.5);
  EXPECT_EQ(aff.a, 20.0);
  EXPECT_EQ(aff.b, -20.0);
}

TEST(Affine, MetricDepthIsAffine) {
  const AffineScale aff = AffineScale::from_alpha_beta(2.0, 1.0, 1.49, 3.5);
  const DepthMap rel(1, 3, std::vector<double>{0.0, 0.5, 1.0});
  const DepthMap d = metric_depth(rel, aff);
  EXPECT_NEAR(d[0], 1.0, 1e-12);
  EXPECT_NEAR(d[1], 2.0, 1e-12);
  EXPECT_NEAR(d[2], 3.0, 1e-12);
  EXPECT_THROW(metric_depth(DepthMap(1, 1, 1.5), aff), DomainError);
}

TEST(Adam, MatchesScalarReference) {
  const double lr = 0.1;
  std::vector<double> p{1.0, -2.0};
  Adam opt(2, lr);
  double m0 = 0.0, v0 = 0.0, x0 = 1.0;
  for (int t = 1; t <= 5; ++t) {
    const std::vector<double> g{2.0 * p[0], std::cos(p[1])};
    const double gx = 2.0 * x0;
    m0 = 0.9 * m0 + 0.1 * gx;
    v0 = 0.999 * v0 + 0.001 * gx * gx;
    x0 -= lr * (m0 / (1.0 - std::pow(0.9, t))) / (std::sqrt(v0 / (1.0 - std::pow(0.999, t))) + 1e-8);
    opt.step(p, g);
    EXPECT_NEAR(p[0], x0, 1e-14);
  }
  EXPECT_EQ(opt.steps_taken(), 5);
  // First Adam step has magnitude lr regardless of gradient scale.
  std::vector<double> q{0.0};
  Adam one(1, 0.01);
  one.step(q, std::vector<double>{1e6});
  EXPECT_NEAR(q[0], -0.01, 1e-10);
  EXPECT_THROW(one.step(q, std::vector<double>{1.0, 2.0}), ShapeError);
}

TEST(Solver, ConfigValidation) {
  SolveConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.iters = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = SolveConfig{};
  cfg.lr_prior = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = SolveConfig{};
  cfg.tv_weight = -1.0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Solver, TraceAndBestIterateAreConsistent) {
  const CapturePair pair = plane_pair(2.4);
  const PixelPrior prior(16, 16);
  const std::vector<double> init(prior.param_dim(), 0.0);
  SolveConfig cfg;
  cfg.iters = 25;
  cfg.lr_prior = 0.03;
  int calls = 0;
  const SolveResult r = solve(pair, prior, init, AffineScale{}, cfg, [&](const IterationInfo& info) {
    EXPECT_EQ(info.iter, calls);
    ++calls;
  });
  EXPECT_EQ(calls, 25);
  ASSERT_EQ(r.loss_trace.size(), 25u);
  EXPECT_EQ(r.iters_run, 25);
  const auto it = std::min_element(r.loss_trace.begin(), r.loss_trace.end());
  EXPECT_EQ(r.best_loss, *it);
  EXPECT_EQ(r.best_iter, it - r.loss_trace.begin());
  EXPECT_LT(r.best_loss, r.loss_trace.front());

  // The reported depth reproduces the reported loss.
  const ObjectiveTerms terms = objective(pair, r.metric_depth, cfg, &r.relative_depth);
  EXPECT_NEAR(terms.total(), r.best_loss, 1e-12 * std::max(1.0, r.best_loss));
  EXPECT_NEAR(r.alpha, r.affine.alpha(), 1e-15);
  EXPECT_NEAR(r.beta, r.affine.beta(), 1e-15);
}

TEST(Solver, IsDeterministic) {
  const CapturePair pair = plane_pair(2.0);
  const GridPrior prior(16, 16, 4, 4, true);
  std::mt19937_64 rng(1);
  std::vector<double> init(prior.param_dim());
  for (double& v : init) v = std::normal_distribution<double>(0.0, 1.0)(rng);
  init = renormalize_latent(init, init.size());
  SolveConfig cfg;
  cfg.iters = 10;
  EXPECT_EQ(solve(pair, prior, init, AffineScale{}, cfg), solve(pair, prior, init, AffineScale{}, cfg));
}

TEST(Solver, LatentParamsStayOnSphere) {
  const CapturePair pair = plane_pair(2.0);
  const GridPrior prior(16, 16, 3, 3, true);
  std::vector<double> init(9, 1.0);
  SolveConfig cfg;
  cfg.iters = 8;
  cfg.lr_prior = 0.2;
  solve(pair, prior, init, AffineScale{}, cfg, [](const IterationInfo& info) {
    const double n = std::sqrt(std::inner_product(info.params.begin(), info.params.end(), info.params.begin(), 0.0));
    EXPECT_NEAR(n, 3.0, 1e-8);
  });
}

TEST(Solver, FrozenPriorMovesOnlyAffine) {
  const CapturePair pair = plane_pair(2.0);
  const PixelPrior prior(16, 16);
  const std::vector<double> init(prior.param_dim(), 0.3);
  SolveConfig cfg;
  cfg.iters = 12;
  cfg.freeze_prior = true;
  const SolveResult r = solve(pair, prior, init, AffineScale{}, cfg);
  EXPECT_EQ(r.params, init);
}

TEST(Solver, RejectsMismatchedInputs) {
  const CapturePair pair = plane_pair(2.0, 8);
  const PixelPrior prior(8, 8);
  EXPECT_THROW(solve(pair, prior, std::vector<double>(63), AffineScale{}, SolveConfig{}), ShapeError);
  const PixelPrior wrong(8, 9);
  EXPECT_THROW(solve(pair, wrong, std::vector<double>(72), AffineScale{}, SolveConfig{}), ShapeError);
}

TEST(Solver, NonFiniteLossRaisesWithIteration) {
  CapturePair pair = plane_pair(2.0, 8);
  pair.blurred.image.at(2, 2) = std::numeric_limits<double>::quiet_NaN();
  const PixelPrior prior(8, 8);
  try {
    solve(pair, prior, std::vector<double>(64, 0.0), AffineScale{}, SolveConfig{});
    FAIL() << "expected SolveError";
  } catch (const SolveError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration 0"), std::string::npos);
  }
}

TEST(Solver, GridSweepIsAlphaMajor) {
  const Scene scene = [] {
    SceneSpec spec;
    spec.height = 8;
    spec.width = 8;
    spec.plane_depth = 2.0;
    return make_scene(spec);
  }();
  const CaptureSet set = simulate_captures(scene.aif, scene.depth, reference_camera(22.0), std::vector<double>{8.0}, PsfModel::disc());
  const CapturePair pair = normalize_capture(make_pair(set, 0));
  const PixelPrior prior(8, 8);
  const std::vector<double> params(64, 0.0);
  SolveConfig cfg;
  cfg.iters = 3;
  const std::vector<double> alphas{0.5, 1.0};
  const std::vector<double> betas{0.2, 0.9, 1.4};
  const auto cells = grid_init_sweep(pair, prior, params, scene.depth, cfg, 1.49, 3.5, alphas, betas);
  ASSERT_EQ(cells.size(), 6u);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(cells[i].alpha0, alphas[i / 3]);
    EXPECT_EQ(cells[i].beta0, betas[i % 3]);
    EXPECT_GE(cells[i].delta1, 0.0);
    EXPECT_LE(cells[i].delta1, 1.0);
  }
}

}  // namespace
}  // namespace dfd
