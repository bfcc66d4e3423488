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

#ifndef DFD_OPTICS_HPP_
#define DFD_OPTICS_HPP_

#include <vector>

namespace dfd {

/// Thin-lens parameters of a single capture.
///
/// pixel_pitch_m is the effective pitch at the working resolution. When a
/// sensor image is downsampled, use effective_pixel_pitch() to scale the
/// native pitch by the downsample factor.
struct CameraConfig {
  double focal_length_m = 0.05;
  double focus_distance_m = 0.8;
  double f_stop = 8.0;
  double pixel_pitch_m = 6.41e-6;
  double exposure_s = 1.0;
  int max_window_px = 63;

  /// Throws DomainError when any invariant is violated.
  void validate() const;

  /// Near-field floor below which the circle of confusion is not evaluated.
  double min_depth() const { return 1.1 * focal_length_m; }

  /// Limit of the CoC diameter as depth goes to infinity, in pixels.
  double coc_asymptote() const;

  /// Largest CoC diameter the window can hold with its fall-off ring.
  double max_coc() const { return static_cast<double>(max_window_px) - 2.0; }

  CameraConfig with_f_stop(double n) const {
    CameraConfig c = *this;
    c.f_stop = n;
    return c;
  }

  friend bool operator==(const CameraConfig&, const CameraConfig&) = default;
};

double effective_pixel_pitch(double native_pitch_m, int native_width, int working_width);

enum class PsfVariant { Disc, Gaussian };

struct PsfModel {
  PsfVariant variant = PsfVariant::Disc;
  double gaussian_sigma_ratio = 0.25;  // sigma / CoC diameter

  static PsfModel disc() { return {}; }
  static PsfModel gaussian(double sigma_ratio = 0.25) { return {PsfVariant::Gaussian, sigma_ratio}; }

  void validate() const;

  friend bool operator==(const PsfModel&, const PsfModel&) = default;
};

/// Normalized square PSF of side `size` centered on (center, center).
struct PsfKernel {
  int size = 1;
  int center = 0;
  double coc = 0.0;      // diameter actually used, after clamping
  bool clamped = false;  // true when c(d) exceeded the window budget
  std::vector<double> weights;

  double at(int dy, int dx) const {
    return weights[static_cast<std::size_t>(center + dy) * size + (center + dx)];
  }
  double sum() const;
};

/// Circle-of-confusion diameter in pixels for a point at depth d (meters).
/// Throws DomainError for d <= cam.min_depth() or an invalid camera.
double coc_diameter(double depth_m, const CameraConfig& cam);

/// dc/dd in pixels per meter. At d == F the right-hand limit is returned.
double coc_derivative(double depth_m, const CameraConfig& cam);

/// CoC clamped to the window budget, with the matching derivative
/// (zero where the clamp is active).
struct CocSample {
  double coc = 0.0;
  double dcoc_ddepth = 0.0;
  bool clamped = false;
};
CocSample clamped_coc(double depth_m, const CameraConfig& cam);

/// Un-normalized disc weight with a one-pixel linear fall-off:
/// 1 inside radius (c-1)/2, (c+1)/2 - m on the rim, 0 outside.
double disc_weight(double m, double coc);

/// d(disc_weight)/dc. Branch boundaries take the rim slope (0.5).
double disc_weight_slope(double m, double coc);

PsfKernel build_kernel(double depth_m, const CameraConfig& cam, const PsfModel& model);

}  // namespace dfd

#endif  // DFD_OPTICS_HPP_
