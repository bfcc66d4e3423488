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

#ifndef DFD_GRAD_HPP_
#define DFD_GRAD_HPP_

#include <cstdint>
#include <string>

#include "dfd/image.hpp"
#include "dfd/optics.hpp"

namespace dfd {

/// d<upstream, render_blur(aif, depth)>/d depth.
DepthMap render_blur_vjp(const ImageBuffer& aif, const DepthMap& depth, const CameraConfig& cam,
                         const PsfModel& model, const ImageBuffer& upstream);

struct LossAndGrad {
  double loss = 0.0;
  ImageBuffer grad;
};

/// Squared L2 loss ||pred - obs||^2 and its gradient 2 (pred - obs).
LossAndGrad loss_and_grad(const ImageBuffer& pred, const ImageBuffer& obs);

struct GradReport {
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  int num_points = 0;
  double step = 0.0;

  std::string to_json() const;
};

struct FiniteDiffOptions {
  int probes = 64;
  /// Central-difference step. Relative to the probed depth when
  /// relative_step is set (h = step * d), otherwise in meters.
  double step = 1e-5;
  bool relative_step = true;
  std::uint64_t seed = 0;
};

/// Compares render_blur_vjp against central differences of the scalar
/// <w, render_blur(aif, depth)> for a fixed random weighting w, at randomly
/// chosen pixels. Pixels whose +-2h interval straddles the focus distance,
/// a PSF branch boundary or the CoC clamp are skipped and redrawn.
///
/// The relative error at a probe is |a - n| / max(|a|, |n|). Probes where
/// both values are below the central-difference round-off level
/// (1e4 * eps * sum|w * out| / h) count as exact agreement.
GradReport finite_diff_check(const ImageBuffer& aif, const DepthMap& depth, const CameraConfig& cam,
                             const PsfModel& model, const FiniteDiffOptions& options = {});

/// True when c(d) crosses a kink of the PSF (focus, rim boundary, clamp)
/// somewhere in [d - band, d + band].
bool near_psf_kink(double depth_m, double band_m, const CameraConfig& cam, const PsfModel& model);

}  // namespace dfd

#endif  // DFD_GRAD_HPP_
