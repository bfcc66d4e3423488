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

#include "dfd/optics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dfd/errors.hpp"

namespace dfd {

void CameraConfig::validate() const {
  auto fail = [](const std::string& what) { throw DomainError("invalid camera: " + what); };
  if (!(focal_length_m > 0.0)) fail("focal_length_m must be > 0");
  if (!(focus_distance_m > focal_length_m)) fail("focus_distance_m must exceed focal_length_m");
  if (!(f_stop > 0.0)) fail("f_stop must be > 0");
  if (!(pixel_pitch_m > 0.0)) fail("pixel_pitch_m must be > 0");
  if (!(exposure_s > 0.0)) fail("exposure_s must be > 0");
  if (max_window_px < 1 || max_window_px % 2 == 0) fail("max_window_px must be odd and >= 1");
  if (!std::isfinite(focal_length_m) || !std::isfinite(focus_distance_m) || !std::isfinite(f_stop) ||
      !std::isfinite(pixel_pitch_m) || !std::isfinite(exposure_s)) {
    fail("parameters must be finite");
  }
}

double CameraConfig::coc_asymptote() const {
  return focal_length_m * focal_length_m /
         (f_stop * (focus_distance_m - focal_length_m) * pixel_pitch_m);
}

double effective_pixel_pitch(double native_pitch_m, int native_width, int working_width) {
  if (!(native_pitch_m > 0.0) || native_width <= 0 || working_width <= 0) {
    throw DomainError("effective_pixel_pitch: arguments must be positive");
  }
  return native_pitch_m * (static_cast<double>(native_width) / working_width);
}

void PsfModel::validate() const {
  if (variant == PsfVariant::Gaussian && !(gaussian_sigma_ratio > 0.0)) {
    throw DomainError("gaussian_sigma_ratio must be > 0");
  }
}

double PsfKernel::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

namespace {

void check_depth(double depth_m, const CameraConfig& cam) {
  if (!(depth_m > cam.min_depth()) || !std::isfinite(depth_m)) {
    throw DomainError("depth " + std::to_string(depth_m) + " m is below the near-field floor " +
                      std::to_string(cam.min_depth()) + " m");
  }
}

}  // namespace

double coc_diameter(double depth_m, const CameraConfig& cam) {
  cam.validate();
  check_depth(depth_m, cam);
  const double f = cam.focal_length_m;
  const double focus = cam.focus_distance_m;
  return (f * f / cam.f_stop) * std::abs(depth_m - focus) /
         (depth_m * (focus - f) * cam.pixel_pitch_m);
}

double coc_derivative(double depth_m, const CameraConfig& cam) {
  cam.validate();
  check_depth(depth_m, cam);
  const double f = cam.focal_length_m;
  const double focus = cam.focus_distance_m;
  const double sign = depth_m < focus ? -1.0 : 1.0;
  return sign * f * f * focus /
         (cam.f_stop * (focus - f) * cam.pixel_pitch_m * depth_m * depth_m);
}

CocSample clamped_coc(double depth_m, const CameraConfig& cam) {
  CocSample s;
  s.coc = coc_diameter(depth_m, cam);
  if (s.coc > cam.max_coc()) {
    s.coc = std::max(0.0, cam.max_coc());
    s.clamped = true;
    s.dcoc_ddepth = 0.0;
  } else {
    s.dcoc_ddepth = coc_derivative(depth_m, cam);
  }
  return s;
}

double disc_weight(double m, double coc) {
  if (m <= (coc - 1.0) / 2.0) return 1.0;
  if (m <= (coc + 1.0) / 2.0) return (coc + 1.0) / 2.0 - m;
  return 0.0;
}

double disc_weight_slope(double m, double coc) {
  return (m >= (coc - 1.0) / 2.0 && m <= (coc + 1.0) / 2.0) ? 0.5 : 0.0;
}

PsfKernel build_kernel(double depth_m, const CameraConfig& cam, const PsfModel& model) {
  model.validate();
  const CocSample sample = clamped_coc(depth_m, cam);

  PsfKernel k;
  k.size = cam.max_window_px;
  k.center = (k.size - 1) / 2;
  k.coc = sample.coc;
  k.clamped = sample.clamped;
  k.weights.assign(static_cast<std::size_t>(k.size) * k.size, 0.0);

  const double sigma = model.gaussian_sigma_ratio * sample.coc;
  double total = 0.0;
  for (int i = 0; i < k.size; ++i) {
    for (int j = 0; j < k.size; ++j) {
      const double di = i - k.center;
      const double dj = j - k.center;
      const double m = std::sqrt(di * di + dj * dj);
      double w;
      if (model.variant == PsfVariant::Disc) {
        w = disc_weight(m, sample.coc);
      } else if (sigma > 0.0) {
        w = std::exp(-(m * m) / (2.0 * sigma * sigma));
      } else {
        w = m == 0.0 ? 1.0 : 0.0;
      }
      k.weights[static_cast<std::size_t>(i) * k.size + j] = w;
      total += w;
    }
  }
  for (double& w : k.weights) w /= total;
  return k;
}

}  // namespace dfd
