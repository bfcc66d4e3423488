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

#include "dfd/grad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "json.hpp"

#include "dfd/errors.hpp"
#include "dfd/render.hpp"

namespace dfd {

DepthMap render_blur_vjp(const ImageBuffer& aif, const DepthMap& depth, const CameraConfig& cam,
                         const PsfModel& model, const ImageBuffer& upstream) {
  DefocusRenderer renderer(aif, cam, model);
  renderer.render(depth);
  return renderer.vjp(upstream);
}

LossAndGrad loss_and_grad(const ImageBuffer& pred, const ImageBuffer& obs) {
  if (!pred.same_shape(obs)) throw ShapeError("loss_and_grad: image shapes differ");
  LossAndGrad out{0.0, ImageBuffer(pred.height(), pred.width(), pred.channels())};
  const auto p = pred.data();
  const auto o = obs.data();
  auto g = out.grad.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p[i] - o[i];
    out.loss += r * r;
    g[i] = 2.0 * r;
  }
  return out;
}

std::string GradReport::to_json() const {
  nlohmann::json j;
  j["max_rel_error"] = max_rel_error;
  j["mean_rel_error"] = mean_rel_error;
  j["num_points"] = num_points;
  j["step"] = step;
  return j.dump();
}

bool near_psf_kink(double depth_m, double band_m, const CameraConfig& cam, const PsfModel& model) {
  const double lo_d = depth_m - band_m;
  const double hi_d = depth_m + band_m;
  if (lo_d <= cam.min_depth()) return true;
  if (lo_d <= cam.focus_distance_m && hi_d >= cam.focus_distance_m) return true;

  const double c_a = coc_diameter(lo_d, cam);
  const double c_b = coc_diameter(hi_d, cam);
  const double c_lo = std::min(c_a, c_b);
  const double c_hi = std::max(c_a, c_b);
  const double cap = cam.max_coc();
  if (c_lo <= cap && c_hi >= cap) return true;
  if (c_lo > cap) return false;  // clamped on the whole interval: locally constant
  if (model.variant == PsfVariant::Gaussian) return false;

  // Disc kinks sit where the rim boundaries (c -+ 1)/2 pass an offset
  // distance m, i.e. at c = 2m +- 1.
  const int r = (cam.max_window_px - 1) / 2;
  for (int a = 0; a <= r; ++a) {
    for (int b = a; b <= r; ++b) {
      const double m = std::sqrt(static_cast<double>(a * a + b * b));
      for (double kink : {2.0 * m - 1.0, 2.0 * m + 1.0}) {
        if (kink >= c_lo && kink <= c_hi) return true;
      }
    }
  }
  return false;
}

GradReport finite_diff_check(const ImageBuffer& aif, const DepthMap& depth, const CameraConfig& cam,
                             const PsfModel& model, const FiniteDiffOptions& options) {
  if (options.probes < 1) throw DomainError("finite_diff_check: probes must be >= 1");
  if (!(options.step > 0.0)) throw DomainError("finite_diff_check: step must be > 0");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ImageBuffer weights(aif.height(), aif.width(), aif.channels());
  for (double& w : weights.data()) w = unit(rng);

  DefocusRenderer renderer(aif, cam, model);
  const ImageBuffer base = renderer.render(depth);
  const DepthMap analytic = renderer.vjp(weights);

  double magnitude = 0.0;
  {
    const auto b = base.data();
    const auto w = weights.data();
    for (std::size_t i = 0; i < b.size(); ++i) magnitude += std::abs(w[i] * b[i]);
  }

  auto scalar = [&](const DepthMap& d) {
    const ImageBuffer out = renderer.render(d);
    const auto o = out.data();
    const auto w = weights.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) sum += w[i] * o[i];
    return sum;
  };

  std::uniform_int_distribution<std::size_t> pick(0, depth.size() - 1);
  GradReport report;
  report.step = options.step;
  double total = 0.0;
  const int max_attempts = options.probes * 200;
  DepthMap probe = depth;
  for (int attempt = 0; attempt < max_attempts && report.num_points < options.probes; ++attempt) {
    const std::size_t u = pick(rng);
    const double d = depth[u];
    const double h = options.relative_step ? options.step * d : options.step;
    if (near_psf_kink(d, 2.0 * h, cam, model)) continue;

    probe[u] = d + h;
    const double plus = scalar(probe);
    probe[u] = d - h;
    const double minus = scalar(probe);
    probe[u] = d;
    const double numeric = (plus - minus) / (2.0 * h);

    // Central differences cannot resolve gradients below their round-off.
    const double noise = 1e4 * std::numeric_limits<double>::epsilon() * magnitude / h;
    const double scale = std::max(std::abs(analytic[u]), std::abs(numeric));
    const double err = scale < noise ? 0.0 : std::abs(analytic[u] - numeric) / scale;
    report.max_rel_error = std::max(report.max_rel_error, err);
    total += err;
    ++report.num_points;
  }
  if (report.num_points == 0) {
    throw DomainError("finite_diff_check: every probed pixel sits on a PSF kink");
  }
  report.mean_rel_error = total / report.num_points;
  return report;
}

}  // namespace dfd
