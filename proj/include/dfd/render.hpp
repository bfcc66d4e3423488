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

#ifndef DFD_RENDER_HPP_
#define DFD_RENDER_HPP_

#include <memory>

#include "dfd/image.hpp"
#include "dfd/optics.hpp"

namespace dfd {

/// Spatially varying defocus forward model.
///
/// Every source pixel u spreads its radiance with its own normalized PSF
/// h_u, sized by the CoC of depth(u). The output is evaluated as a gather:
///
///   out(i) = sum_u aif(u) h_u(i - u) / sum_u h_u(i - u)
///
/// where u ranges over in-image sources inside the window. The denominator
/// renormalizes pixels whose window is cut by the border (and, for varying
/// depth, keeps a constant image constant). Occlusion is ignored.
///
/// The renderer keeps the state of the most recent render() so that vjp()
/// can reuse it; an instance is therefore not safe for concurrent use.
class DefocusRenderer {
 public:
  DefocusRenderer(ImageBuffer aif, CameraConfig cam, PsfModel model);
  ~DefocusRenderer();
  DefocusRenderer(DefocusRenderer&&) noexcept;
  DefocusRenderer& operator=(DefocusRenderer&&) noexcept;

  const ImageBuffer& aif() const { return aif_; }
  const CameraConfig& camera() const { return cam_; }
  const PsfModel& model() const { return model_; }

  /// Throws ShapeError on size mismatch and DomainError when a depth is at
  /// or below the camera's near-field floor.
  ImageBuffer render(const DepthMap& depth);

  /// Gradient of <upstream, render(depth)> with respect to depth, for the
  /// depth passed to the last render() call.
  DepthMap vjp(const ImageBuffer& upstream) const;

 private:
  struct State;

  ImageBuffer aif_;
  CameraConfig cam_;
  PsfModel model_;
  std::unique_ptr<State> state_;
};

ImageBuffer render_blur(const ImageBuffer& aif, const DepthMap& depth, const CameraConfig& cam,
                        const PsfModel& model);

/// (t_aif / t_b) * (N_b^2 / N_aif^2): factor that brings the wide-aperture
/// capture to the energy level of the all-in-focus capture.
double energy_scale(const CameraConfig& aif_cfg, const CameraConfig& blur_cfg);

struct Capture {
  ImageBuffer image;
  CameraConfig camera;
};

/// Two exposures of one scene: a small-aperture all-in-focus image and a
/// wide-aperture defocused one.
struct CapturePair {
  Capture aif;
  Capture blurred;

  /// Shapes must agree and aif.f_stop must exceed blurred.f_stop.
  void validate() const;
};

/// Returns the pair with the blurred image multiplied by energy_scale.
CapturePair normalize_capture(const CapturePair& pair);

}  // namespace dfd

#endif  // DFD_RENDER_HPP_
