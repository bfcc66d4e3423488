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

#include "dfd/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dfd/config_io.hpp"
#include "dfd/errors.hpp"
#include "dfd/image_io.hpp"

namespace dfd {

namespace fs = std::filesystem;

SceneKind parse_scene_kind(const std::string& name) {
  if (name == "textured_plane") return SceneKind::TexturedPlane;
  if (name == "staircase") return SceneKind::Staircase;
  if (name == "slanted_plane") return SceneKind::SlantedPlane;
  if (name == "rgbd_import") return SceneKind::RgbdImport;
  throw DomainError("unknown scene kind: " + name);
}

TextureKind parse_texture_kind(const std::string& name) {
  if (name == "checker") return TextureKind::Checker;
  if (name == "noise") return TextureKind::ValueNoise;
  if (name == "image") return TextureKind::ImageFile;
  throw DomainError("unknown texture kind: " + name);
}

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::TexturedPlane: return "textured_plane";
    case SceneKind::Staircase: return "staircase";
    case SceneKind::SlantedPlane: return "slanted_plane";
    case SceneKind::RgbdImport: return "rgbd_import";
  }
  return "?";
}

std::string to_string(TextureKind kind) {
  switch (kind) {
    case TextureKind::Checker: return "checker";
    case TextureKind::ValueNoise: return "noise";
    case TextureKind::ImageFile: return "image";
  }
  return "?";
}

void SceneSpec::validate() const {
  if (kind == SceneKind::RgbdImport) {
    if (image_path.empty() || depth_path.empty()) {
      throw DomainError("rgbd_import needs image_path and depth_path");
    }
    return;
  }
  if (height <= 0 || width <= 0) throw DomainError("scene size must be positive");
  if (channels != 1 && channels != 3) throw DomainError("scene channels must be 1 or 3");
  if (!(d_min > 0.0) || !(d_max > d_min)) throw DomainError("scene depth bounds are inverted");
  if (contrast < 0.0 || texture_mean - contrast / 2.0 < 0.0) {
    throw DomainError("texture mean/contrast would produce negative intensities");
  }
  if (texture == TextureKind::Checker && checker_px < 1) throw DomainError("checker_px must be >= 1");
  if (texture == TextureKind::ImageFile && image_path.empty()) {
    throw DomainError("image texture needs image_path");
  }
  auto in_bounds = [&](double d) { return d >= d_min && d <= d_max; };
  switch (kind) {
    case SceneKind::TexturedPlane:
      if (!in_bounds(plane_depth)) throw DomainError("plane depth outside scene bounds");
      break;
    case SceneKind::Staircase:
      if (step_depths.empty()) throw DomainError("staircase needs at least one step");
      if (!std::all_of(step_depths.begin(), step_depths.end(), in_bounds)) {
        throw DomainError("staircase depth outside scene bounds");
      }
      if (!step_fractions.empty()) {
        if (step_fractions.size() != step_depths.size()) {
          throw DomainError("step_fractions must match step_depths");
        }
        if (std::any_of(step_fractions.begin(), step_fractions.end(), [](double f) { return !(f > 0.0); })) {
          throw DomainError("step_fractions must be positive");
        }
      }
      break;
    case SceneKind::SlantedPlane:
      if (!in_bounds(slant_left) || !in_bounds(slant_right)) {
        throw DomainError("slanted plane depth outside scene bounds");
      }
      break;
    case SceneKind::RgbdImport:
      break;
  }
}

namespace {

// Portable uniform [0, 1) from the raw 64-bit engine output.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double to_float32(double v) { return static_cast<double>(static_cast<float>(v)); }

// Sum of bilinearly interpolated random lattices at cell sizes 8, 4 and 2.
std::vector<double> value_noise(int height, int width, std::mt19937_64& rng) {
  std::vector<double> field(static_cast<std::size_t>(height) * width, 0.0);
  const int cells[] = {8, 4, 2};
  const double weights[] = {0.45, 0.35, 0.2};
  for (int o = 0; o < 3; ++o) {
    const int cell = cells[o];
    const int gh = height / cell + 2;
    const int gw = width / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(gh) * gw);
    for (double& v : lattice) v = unit_uniform(rng);
    for (int y = 0; y < height; ++y) {
      const double fy = static_cast<double>(y) / cell;
      const int y0 = static_cast<int>(fy);
      const double ty = fy - y0;
      for (int x = 0; x < width; ++x) {
        const double fx = static_cast<double>(x) / cell;
        const int x0 = static_cast<int>(fx);
        const double tx = fx - x0;
        const double v00 = lattice[y0 * gw + x0];
        const double v01 = lattice[y0 * gw + x0 + 1];
        const double v10 = lattice[(y0 + 1) * gw + x0];
        const double v11 = lattice[(y0 + 1) * gw + x0 + 1];
        const double top = v00 + tx * (v01 - v00);
        const double bottom = v10 + tx * (v11 - v10);
        field[static_cast<std::size_t>(y) * width + x] += weights[o] * (top + ty * (bottom - top));
      }
    }
  }
  return field;
}

std::vector<double> checker(int height, int width, int size, std::mt19937_64& rng) {
  const int phase_y = static_cast<int>(unit_uniform(rng) * size);
  const int phase_x = static_cast<int>(unit_uniform(rng) * size);
  std::vector<double> field(static_cast<std::size_t>(height) * width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      field[static_cast<std::size_t>(y) * width + x] = ((y + phase_y) / size + (x + phase_x) / size) % 2;
    }
  }
  return field;
}

// Stretches the field to [mean - contrast/2, mean + contrast/2].
void apply_contrast(std::vector<double>& field, double mean, double contrast) {
  const auto [lo_it, hi_it] = std::minmax_element(field.begin(), field.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  for (double& v : field) {
    const double t = span > 0.0 ? (v - lo) / span : 0.5;
    v = mean + contrast * (t - 0.5);
  }
}

ImageBuffer make_texture(const SceneSpec& spec) {
  if (spec.texture == TextureKind::ImageFile) {
    ImageBuffer img = read_image(spec.image_path);
    if (img.height() != spec.height || img.width() != spec.width) {
      throw ShapeError("texture image size does not match the scene size");
    }
    return img;
  }
  std::mt19937_64 rng(spec.seed);
  ImageBuffer img(spec.height, spec.width, spec.channels);
  for (int c = 0; c < spec.channels; ++c) {
    std::vector<double> field = spec.texture == TextureKind::Checker
                                    ? checker(spec.height, spec.width, spec.checker_px, rng)
                                    : value_noise(spec.height, spec.width, rng);
    apply_contrast(field, spec.texture_mean, spec.contrast);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        img.at(y, x, c) = to_float32(field[static_cast<std::size_t>(y) * spec.width + x]);
      }
    }
  }
  return img;
}

DepthMap make_depth(const SceneSpec& spec) {
  DepthMap depth(spec.height, spec.width);
  switch (spec.kind) {
    case SceneKind::TexturedPlane:
      std::fill(depth.values().begin(), depth.values().end(), to_float32(spec.plane_depth));
      break;
    case SceneKind::Staircase: {
      std::vector<double> fractions = spec.step_fractions;
      if (fractions.empty()) fractions.assign(spec.step_depths.size(), 1.0);
      const double total = std::accumulate(fractions.begin(), fractions.end(), 0.0);
      std::vector<int> edges;  // first column of each step after the first
      double cum = 0.0;
      for (std::size_t s = 0; s + 1 < fractions.size(); ++s) {
        cum += fractions[s];
        edges.push_back(static_cast<int>(std::lround(cum / total * spec.width)));
      }
      for (int x = 0; x < spec.width; ++x) {
        std::size_t step = 0;
        while (step < edges.size() && x >= edges[step]) ++step;
        const double d = to_float32(spec.step_depths[step]);
        for (int y = 0; y < spec.height; ++y) depth.at(y, x) = d;
      }
      break;
    }
    case SceneKind::SlantedPlane:
      for (int x = 0; x < spec.width; ++x) {
        const double t = spec.width > 1 ? static_cast<double>(x) / (spec.width - 1) : 0.0;
        const double d = to_float32(spec.slant_left + t * (spec.slant_right - spec.slant_left));
        for (int y = 0; y < spec.height; ++y) depth.at(y, x) = d;
      }
      break;
    case SceneKind::RgbdImport:
      break;
  }
  return depth;
}

}  // namespace

Scene make_scene(const SceneSpec& spec) {
  spec.validate();
  if (spec.kind == SceneKind::RgbdImport) {
    Scene s = load_rgbd(spec.image_path, spec.depth_path);
    for (double d : s.depth.data()) {
      if (d > 0.0 && (d < spec.d_min || d > spec.d_max)) {
        throw DomainError("imported depth outside the declared scene bounds");
      }
    }
    return s;
  }
  return Scene{make_texture(spec), make_depth(spec)};
}

Scene load_rgbd(const fs::path& image_path, const fs::path& depth_path) {
  Scene s{read_image(image_path), read_depth(depth_path)};
  if (!s.depth.same_shape(s.aif)) {
    throw ShapeError("RGBD pair shape mismatch: image " + std::to_string(s.aif.height()) + "x" +
                     std::to_string(s.aif.width()) + ", depth " + std::to_string(s.depth.height()) + "x" +
                     std::to_string(s.depth.width()));
  }
  return s;
}

CaptureSet simulate_captures(const ImageBuffer& aif, const DepthMap& gt_depth, const CameraConfig& aif_cam,
                             std::span<const double> f_stops, const PsfModel& model) {
  if (f_stops.empty()) throw DomainError("simulate_captures: f_stops is empty");
  aif_cam.validate();

  CaptureSet set{Capture{aif, aif_cam}, gt_depth, {}};
  for (double n : f_stops) {
    const CameraConfig cam = aif_cam.with_f_stop(n);
    cam.validate();
    DefocusRenderer at_n(aif, cam, model);
    ImageBuffer image = at_n.render(gt_depth);
    const double k = energy_scale(aif_cam, cam);
    for (double& v : image.data()) v /= k;
    set.blurred.push_back(Capture{std::move(image), cam});
  }
  return set;
}

CapturePair make_pair(const CaptureSet& set, std::size_t index) {
  if (index >= set.blurred.size()) throw DomainError("make_pair: capture index out of range");
  CapturePair pair{set.aif, set.blurred[index]};
  pair.validate();
  return pair;
}

std::string f_stop_tag(double f_stop) { return "N" + format_double(f_stop); }

std::vector<fs::path> save_capture_set(const fs::path& dir, const CaptureSet& set) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto emit = [&](const fs::path& p) { written.push_back(p); };

  write_pfm(dir / "aif.pfm", set.aif.image);
  emit(dir / "aif.pfm");
  write_pfm(dir / "gt_depth.pfm", set.gt_depth);
  emit(dir / "gt_depth.pfm");
  write_json_file(dir / "cam_aif.json", nlohmann::json(set.aif.camera));
  emit(dir / "cam_aif.json");

  nlohmann::json cams;
  cams["aif"] = set.aif.camera;
  cams["captures"] = nlohmann::json::array();
  for (const Capture& c : set.blurred) {
    const std::string tag = f_stop_tag(c.camera.f_stop);
    const std::string image_name = "blur_" + tag + ".pfm";
    const std::string cam_name = "cam_" + tag + ".json";
    write_pfm(dir / image_name, c.image);
    emit(dir / image_name);
    write_json_file(dir / cam_name, nlohmann::json(c.camera));
    emit(dir / cam_name);
    cams["captures"].push_back({{"f_stop", c.camera.f_stop}, {"image", image_name}, {"camera", c.camera}});
  }
  write_json_file(dir / "cams.json", cams);
  emit(dir / "cams.json");
  return written;
}

std::vector<SweepRow> aperture_sweep_experiment(const SceneSpec& spec, const CameraConfig& aif_cam,
                                                std::span<const double> f_stops, const SolveConfig& cfg,
                                                const AffineScale& aff0) {
  const Scene scene = make_scene(spec);
  const CaptureSet set = simulate_captures(scene.aif, scene.depth, aif_cam, f_stops, cfg.psf_model);
  const PixelPrior prior(scene.aif.height(), scene.aif.width());
  const std::vector<double> init(prior.param_dim(), 0.0);

  std::vector<SweepRow> rows;
  rows.reserve(f_stops.size());
  for (std::size_t i = 0; i < set.blurred.size(); ++i) {
    const CapturePair pair = normalize_capture(make_pair(set, i));
    const SolveResult r = solve(pair, prior, init, aff0, cfg);
    rows.push_back({set.blurred[i].camera.f_stop, compute_metrics(r.metric_depth, scene.depth), r.best_loss});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "N,rmse,rel,log10,d1,d2,d3,valid_pixels,final_loss\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.f_stop) << ',' << format_double(r.metrics.rmse) << ','
        << format_double(r.metrics.rel) << ',' << format_double(r.metrics.log10) << ','
        << format_double(r.metrics.delta1) << ',' << format_double(r.metrics.delta2) << ','
        << format_double(r.metrics.delta3) << ',' << r.metrics.valid_pixels << ','
        << format_double(r.final_loss) << '\n';
  }
  return out.str();
}

}  // namespace dfd
