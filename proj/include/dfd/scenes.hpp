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

#ifndef DFD_SCENES_HPP_
#define DFD_SCENES_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dfd/eval.hpp"
#include "dfd/image.hpp"
#include "dfd/optics.hpp"
#include "dfd/render.hpp"
#include "dfd/solver.hpp"

namespace dfd {

enum class SceneKind { TexturedPlane, Staircase, SlantedPlane, RgbdImport };
enum class TextureKind { Checker, ValueNoise, ImageFile };

SceneKind parse_scene_kind(const std::string& name);
TextureKind parse_texture_kind(const std::string& name);
std::string to_string(SceneKind kind);
std::string to_string(TextureKind kind);

struct SceneSpec {
  SceneKind kind = SceneKind::TexturedPlane;
  int height = 64;
  int width = 64;
  int channels = 1;

  double plane_depth = 2.0;                  // textured_plane
  std::vector<double> step_depths{1.6, 2.4}; // staircase, left to right
  std::vector<double> step_fractions;        // staircase widths; empty = equal
  double slant_left = 1.6;                   // slanted_plane: depth at column 0
  double slant_right = 2.4;                  // ... and at the last column

  TextureKind texture = TextureKind::ValueNoise;
  double texture_mean = 0.5;
  double contrast = 0.8;  // peak-to-peak intensity range
  int checker_px = 4;

  std::string image_path;  // rgbd_import, or texture = image_file
  std::string depth_path;  // rgbd_import

  double d_min = 0.1;
  double d_max = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Scene {
  ImageBuffer aif;
  DepthMap depth;
};

/// Deterministic in spec.seed. Intensities and depths are rounded to
/// float32 so scenes survive a PFM round trip bit-exactly.
Scene make_scene(const SceneSpec& spec);

/// Linear image + metric depth. Images: .pfm (linear) or .png (sRGB).
/// Depth: .pfm (meters) or 16-bit .png (millimeters).
Scene load_rgbd(const std::filesystem::path& image_path, const std::filesystem::path& depth_path);

struct CaptureSet {
  Capture aif;
  DepthMap gt_depth;
  std::vector<Capture> blurred;
};

/// Renders one defocused capture per f-stop from (aif, gt_depth).
///
/// aif is the all-in-focus radiance, labelled with aif_cam (its f-stop is
/// the small-aperture setting). Each capture keeps aif_cam, exposure
/// included, except for the f-stop. Its stored image is the raw level
/// render / energy_scale(aif_cam, cam_N), brighter than the AIF by the
/// aperture area ratio; normalize_capture maps it back onto the render.
CaptureSet simulate_captures(const ImageBuffer& aif, const DepthMap& gt_depth, const CameraConfig& aif_cam,
                             std::span<const double> f_stops, const PsfModel& model = {});

CapturePair make_pair(const CaptureSet& set, std::size_t index);

/// Writes aif.pfm, gt_depth.pfm, blur_N<value>.pfm, cams.json and one
/// cam_aif.json / cam_N<value>.json per capture. Returns written paths.
std::vector<std::filesystem::path> save_capture_set(const std::filesystem::path& dir, const CaptureSet& set);

std::string f_stop_tag(double f_stop);

struct SweepRow {
  double f_stop = 0.0;
  MetricsReport metrics;
  double final_loss = 0.0;
};

/// For every f-stop: simulate the capture, energy-normalize, solve from a
/// zero-logit PixelPrior with aff0, and score against the scene depth.
std::vector<SweepRow> aperture_sweep_experiment(const SceneSpec& spec, const CameraConfig& aif_cam,
                                                std::span<const double> f_stops, const SolveConfig& cfg,
                                                const AffineScale& aff0);

/// Header: N,rmse,rel,log10,d1,d2,d3,valid_pixels,final_loss
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace dfd

#endif  // DFD_SCENES_HPP_
