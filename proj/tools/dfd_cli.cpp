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

// dfd: command-line front end.
//
// Exit codes: 0 success, 1 domain/format/solver error, 2 usage error.
// Diagnostics go to stderr; machine output goes to files or stdout.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfd/config_io.hpp"
#include "dfd/errors.hpp"
#include "dfd/eval.hpp"
#include "dfd/grad.hpp"
#include "dfd/image_io.hpp"
#include "dfd/manifest.hpp"
#include "dfd/parallel.hpp"
#include "dfd/prior.hpp"
#include "dfd/render.hpp"
#include "dfd/scenes.hpp"
#include "dfd/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

// Exit code carrier for checks that fail without an exception.
struct Exit {
  int code;
};

struct PsfOptions {
  std::string variant = "disc";
  double sigma_ratio = 0.25;

  dfd::PsfModel model() const {
    return variant == "gaussian" ? dfd::PsfModel::gaussian(sigma_ratio) : dfd::PsfModel::disc();
  }
  json to_json() const { return {{"psf", variant}, {"sigma_ratio", sigma_ratio}}; }
};

void add_psf_options(CLI::App* cmd, PsfOptions& o) {
  cmd->add_option("--psf", o.variant, "PSF model")->check(CLI::IsMember({"disc", "gaussian"}))->capture_default_str();
  cmd->add_option("--sigma-ratio", o.sigma_ratio, "Gaussian sigma / CoC diameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct SceneOptions {
  dfd::SceneSpec spec;
  std::string kind = "textured_plane";
  std::string texture = "noise";

  dfd::SceneSpec resolve() const {
    dfd::SceneSpec s = spec;
    s.kind = dfd::parse_scene_kind(kind);
    s.texture = dfd::parse_texture_kind(texture);
    return s;
  }
};

void add_scene_options(CLI::App* cmd, SceneOptions& o) {
  auto& s = o.spec;
  cmd->add_option("--kind", o.kind, "textured_plane | staircase | slanted_plane | rgbd_import")
      ->capture_default_str();
  cmd->add_option("--height", s.height)->capture_default_str();
  cmd->add_option("--width", s.width)->capture_default_str();
  cmd->add_option("--channels", s.channels)->check(CLI::IsMember({1, 3}))->capture_default_str();
  cmd->add_option("--plane-depth", s.plane_depth, "textured_plane depth, m")->capture_default_str();
  cmd->add_option("--steps", s.step_depths, "staircase depths left to right, m")->capture_default_str();
  cmd->add_option("--step-fractions", s.step_fractions, "staircase widths (default equal)");
  cmd->add_option("--slant-left", s.slant_left)->capture_default_str();
  cmd->add_option("--slant-right", s.slant_right)->capture_default_str();
  cmd->add_option("--texture", o.texture, "checker | noise | image")->capture_default_str();
  cmd->add_option("--texture-mean", s.texture_mean)->capture_default_str();
  cmd->add_option("--contrast", s.contrast)->capture_default_str();
  cmd->add_option("--checker-px", s.checker_px)->capture_default_str();
  cmd->add_option("--image", s.image_path, "texture image or RGBD color");
  cmd->add_option("--depth", s.depth_path, "RGBD depth (PFM or PNG16 mm)");
  cmd->add_option("--dmin", s.d_min)->capture_default_str();
  cmd->add_option("--dmax", s.d_max)->capture_default_str();
  cmd->add_option("--seed", s.seed)->capture_default_str();
}

json scene_json(const dfd::SceneSpec& s) {
  return {{"kind", dfd::to_string(s.kind)},
          {"height", s.height},
          {"width", s.width},
          {"channels", s.channels},
          {"plane_depth", s.plane_depth},
          {"step_depths", s.step_depths},
          {"step_fractions", s.step_fractions},
          {"slant_left", s.slant_left},
          {"slant_right", s.slant_right},
          {"texture", dfd::to_string(s.texture)},
          {"texture_mean", s.texture_mean},
          {"contrast", s.contrast},
          {"checker_px", s.checker_px},
          {"image_path", s.image_path},
          {"depth_path", s.depth_path},
          {"d_min", s.d_min},
          {"d_max", s.d_max},
          {"seed", s.seed}};
}

// 50 mm lens at f/22 focused at 0.8 m; pitch of a 5616-px sensor row
// resampled to 1126 columns.
dfd::CameraConfig default_aif_camera() {
  dfd::CameraConfig cam;
  cam.f_stop = 22.0;
  cam.pixel_pitch_m = dfd::effective_pixel_pitch(6.41e-6, 5616, 1126);
  return cam;
}

dfd::CameraConfig camera_or_default(const std::string& path) {
  return path.empty() ? default_aif_camera() : dfd::read_camera(path);
}

struct SolveOptions {
  dfd::SolveConfig cfg;
  std::string prior = "pixel";
  int grid_h = 8;
  int grid_w = 8;
  bool latent = false;
  double s_min = 1.49;
  double s_max = 3.5;
  std::optional<double> alpha0;
  std::optional<double> beta0;
  PsfOptions psf;

  dfd::AffineScale affine() const {
    dfd::AffineScale aff{0.0, 0.0, s_min, s_max};
    if (alpha0 || beta0) {
      aff = dfd::AffineScale::from_alpha_beta(alpha0.value_or(aff.alpha()), beta0.value_or(aff.beta()), s_min,
                                              s_max);
    }
    return aff;
  }

  dfd::SolveConfig config() const {
    dfd::SolveConfig c = cfg;
    c.psf_model = psf.model();
    return c;
  }

  json to_json() const {
    json j = psf.to_json();
    j.update({{"prior", prior},
              {"iters", cfg.iters},
              {"lr_prior", cfg.lr_prior},
              {"lr_affine", cfg.lr_affine},
              {"tv", cfg.tv_weight},
              {"smin", s_min},
              {"smax", s_max},
              {"seed", cfg.seed}});
    if (prior == "grid") j.update({{"grid_h", grid_h}, {"grid_w", grid_w}, {"latent", latent}});
    if (alpha0) j["alpha0"] = *alpha0;
    if (beta0) j["beta0"] = *beta0;
    return j;
  }
};

void add_solve_options(CLI::App* cmd, SolveOptions& o, bool with_prior) {
  auto& c = o.cfg;
  if (with_prior) {
    cmd->add_option("--prior", o.prior)->check(CLI::IsMember({"pixel", "grid"}))->capture_default_str();
    cmd->add_option("--grid-h", o.grid_h, "grid prior control rows")->capture_default_str();
    cmd->add_option("--grid-w", o.grid_w, "grid prior control columns")->capture_default_str();
    cmd->add_flag("--latent", o.latent, "renormalize grid parameters to sqrt(M) after every step");
  }
  cmd->add_option("--iters", c.iters)->capture_default_str();
  cmd->add_option("--lr-prior", c.lr_prior)->capture_default_str();
  cmd->add_option("--lr-affine", c.lr_affine)->capture_default_str();
  cmd->add_option("--tv", c.tv_weight, "TV weight on relative depth")->capture_default_str();
  cmd->add_option("--smin", o.s_min, "scene depth bound (beta ceiling), m")->capture_default_str();
  cmd->add_option("--smax", o.s_max, "scene depth bound (alpha ceiling), m")->capture_default_str();
  cmd->add_option("--alpha0", o.alpha0, "initial alpha (default s_max / 2)");
  cmd->add_option("--beta0", o.beta0, "initial beta (default s_min / 2)");
  add_psf_options(cmd, o.psf);
}

std::vector<double> initial_params(const dfd::DepthParameterization& prior, bool latent, std::uint64_t seed) {
  if (!latent) return std::vector<double>(prior.param_dim(), 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> p(prior.param_dim());
  for (double& v : p) v = g(rng);
  return dfd::renormalize_latent(p, p.size());
}

fs::path manifest_path_for(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

void write_manifest(const fs::path& where, const std::string& command, json config,
                    std::vector<fs::path> inputs, std::vector<fs::path> outputs) {
  dfd::RunManifest m;
  m.command = command;
  m.config = std::move(config);
  m.config["threads"] = dfd::thread_count();
  m.inputs = std::move(inputs);
  m.outputs = std::move(outputs);
  m.write(where);
}

std::vector<fs::path> nonempty(std::initializer_list<std::string> paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (!p.empty()) out.emplace_back(p);
  }
  return out;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& p, const std::string& text) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw dfd::FormatError("cannot write " + p.string());
  out << text;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  SceneOptions scene;
  std::string cam_aif;
  std::vector<double> f_stops{4, 8, 11, 13, 16};
  PsfOptions psf;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  const dfd::SceneSpec spec = a.scene.resolve();
  const dfd::Scene scene = dfd::make_scene(spec);
  const dfd::CameraConfig aif_cam = camera_or_default(a.cam_aif);
  const dfd::CaptureSet set = dfd::simulate_captures(scene.aif, scene.depth, aif_cam, a.f_stops, a.psf.model());
  const fs::path dir(a.out);
  const std::vector<fs::path> written = dfd::save_capture_set(dir, set);

  json config = a.psf.to_json();
  config.update({{"scene", scene_json(spec)}, {"f_stops", a.f_stops}, {"cam_aif", aif_cam}});
  write_manifest(dir / "manifest.json", "synth", config,
                 nonempty({a.cam_aif, spec.image_path, spec.depth_path}), written);
  return 0;
}

// ---- render ---------------------------------------------------------------

struct RenderArgs {
  std::string aif;
  std::string depth;
  std::string cam;
  PsfOptions psf;
  std::string out;
};

int run_render(const RenderArgs& a) {
  const dfd::ImageBuffer aif = dfd::read_image(a.aif);
  const dfd::DepthMap depth = dfd::read_depth(a.depth);
  const dfd::CameraConfig cam = dfd::read_camera(a.cam);
  const dfd::ImageBuffer out = dfd::render_blur(aif, depth, cam, a.psf.model());
  ensure_parent(a.out);
  dfd::write_pfm(a.out, out);
  write_manifest(manifest_path_for(a.out), "render", a.psf.to_json(), {a.aif, a.depth, a.cam}, {a.out});
  return 0;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string aif;
  std::string blur;
  std::string cam_aif;
  std::string cam_blur;
  SolveOptions opt;
  std::string out_depth;
  std::string out_report;
};

int run_solve(const SolveArgs& a) {
  dfd::CapturePair raw;
  raw.aif = {dfd::read_image(a.aif), dfd::read_camera(a.cam_aif)};
  raw.blurred = {dfd::read_image(a.blur), dfd::read_camera(a.cam_blur)};
  const dfd::CapturePair pair = dfd::normalize_capture(raw);

  const int h = pair.aif.image.height();
  const int w = pair.aif.image.width();
  std::unique_ptr<dfd::DepthParameterization> prior;
  bool latent = false;
  if (a.opt.prior == "grid") {
    prior = std::make_unique<dfd::GridPrior>(h, w, a.opt.grid_h, a.opt.grid_w, a.opt.latent);
    latent = a.opt.latent;
  } else {
    prior = std::make_unique<dfd::PixelPrior>(h, w);
  }
  const std::vector<double> init = initial_params(*prior, latent, a.opt.cfg.seed);
  const dfd::SolveResult r = dfd::solve(pair, *prior, init, a.opt.affine(), a.opt.config());

  std::vector<fs::path> outputs;
  ensure_parent(a.out_depth);
  dfd::write_pfm(a.out_depth, r.metric_depth);
  outputs.emplace_back(a.out_depth);
  if (!a.out_report.empty()) {
    json report{{"alpha", r.alpha},
                {"beta", r.beta},
                {"a", r.affine.a},
                {"b", r.affine.b},
                {"best_iter", r.best_iter},
                {"best_loss", r.best_loss},
                {"iters", r.iters_run},
                {"energy_scale", dfd::energy_scale(raw.aif.camera, raw.blurred.camera)},
                {"loss_trace", r.loss_trace}};
    ensure_parent(a.out_report);
    dfd::write_json_file(a.out_report, report);
    outputs.emplace_back(a.out_report);
  }
  std::cerr << "solve: best loss " << r.best_loss << " at iteration " << r.best_iter << ", alpha " << r.alpha
            << ", beta " << r.beta << "\n";
  write_manifest(manifest_path_for(a.out_depth), "solve", a.opt.to_json(),
                 {a.aif, a.blur, a.cam_aif, a.cam_blur}, outputs);
  return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string pred_cam;
  std::string gt_cam;
  std::string extrinsics;
  std::string scene;
  std::string out;
};

std::string metrics_csv(const std::string& scene, const dfd::MetricsReport& m) {
  using dfd::format_double;
  std::string s = "scene,rmse,rel,log10,d1,d2,d3,valid_pixels\n";
  s += scene + "," + format_double(m.rmse) + "," + format_double(m.rel) + "," + format_double(m.log10) + "," +
       format_double(m.delta1) + "," + format_double(m.delta2) + "," + format_double(m.delta3) + "," +
       std::to_string(m.valid_pixels) + "\n";
  return s;
}

int run_eval(const EvalArgs& a) {
  const dfd::DepthMap pred = dfd::read_depth(a.pred);
  const dfd::DepthMap gt = dfd::read_depth(a.gt);
  if (a.pred_cam.empty() != a.gt_cam.empty()) {
    std::cerr << "eval: --pred-cam and --gt-cam must be given together\n";
    throw Exit{kExitUsage};
  }
  dfd::MetricsReport m;
  if (a.pred_cam.empty()) {
    m = dfd::compute_metrics(pred, gt);
  } else {
    const dfd::RigidTransform t =
        a.extrinsics.empty() ? dfd::RigidTransform::identity() : dfd::read_extrinsics(a.extrinsics);
    m = dfd::evaluate_aligned(pred, dfd::read_intrinsics(a.pred_cam), gt, dfd::read_intrinsics(a.gt_cam), t);
  }
  const std::string scene = a.scene.empty() ? fs::path(a.pred).stem().string() : a.scene;
  const std::string csv = metrics_csv(scene, m);
  if (a.out.empty()) {
    std::cout << csv;
    return 0;
  }
  write_text(a.out, csv);
  write_manifest(manifest_path_for(a.out), "eval", {{"scene", scene}},
                 nonempty({a.pred, a.gt, a.pred_cam, a.gt_cam, a.extrinsics}), {a.out});
  return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  SceneOptions scene;
  std::string cam_aif;
  std::vector<double> f_stops{2, 4, 8, 16, 64};
  SolveOptions opt;
  std::string out = "sweep.csv";
};

int run_sweep(const SweepArgs& a) {
  const dfd::SceneSpec spec = a.scene.resolve();
  dfd::CameraConfig aif_cam = camera_or_default(a.cam_aif);
  const std::vector<dfd::SweepRow> rows =
      dfd::aperture_sweep_experiment(spec, aif_cam, a.f_stops, a.opt.config(), a.opt.affine());
  write_text(a.out, dfd::sweep_csv(rows));
  json config = a.opt.to_json();
  config.update({{"scene", scene_json(spec)}, {"f_stops", a.f_stops}, {"cam_aif", aif_cam}});
  write_manifest(manifest_path_for(a.out), "sweep", config, nonempty({a.cam_aif, spec.image_path, spec.depth_path}),
                 {a.out});
  return 0;
}

// ---- gradcheck ------------------------------------------------------------

struct GradcheckArgs {
  int size = 16;
  std::uint64_t seed = 0;
  double tol = 1e-3;
  int probes = 64;
  double step = 1e-5;
  double f_stop = 8.0;
  std::string cam;
  PsfOptions psf;
  std::string out;
};

int run_gradcheck(const GradcheckArgs& a) {
  dfd::CameraConfig cam = a.cam.empty() ? default_aif_camera().with_f_stop(a.f_stop) : dfd::read_camera(a.cam);

  // Value-noise texture with depths uniform in [0.5, 3] m, kept 2 cm clear
  // of the focus plane.
  dfd::SceneSpec spec;
  spec.height = a.size;
  spec.width = a.size;
  spec.seed = a.seed;
  const dfd::ImageBuffer aif = dfd::make_scene(spec).aif;
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  dfd::DepthMap depth(a.size, a.size);
  for (double& d : depth.data()) {
    do {
      d = u(rng);
    } while (std::abs(d - cam.focus_distance_m) <= 0.02);
  }

  dfd::FiniteDiffOptions fd;
  fd.probes = a.probes;
  fd.step = a.step;
  fd.seed = a.seed;
  const dfd::GradReport report = dfd::finite_diff_check(aif, depth, cam, a.psf.model(), fd);
  const std::string line = report.to_json();
  std::cout << line << "\n";
  if (!a.out.empty()) {
    write_text(a.out, line + "\n");
    json config = a.psf.to_json();
    config.update({{"size", a.size}, {"seed", a.seed}, {"tol", a.tol}, {"probes", a.probes}, {"step", a.step},
                   {"camera", cam}});
    write_manifest(manifest_path_for(a.out), "gradcheck", config, nonempty({a.cam}), {a.out});
  }
  if (!(report.max_rel_error <= a.tol)) {
    std::cerr << "gradcheck: max relative error " << report.max_rel_error << " exceeds tolerance " << a.tol << "\n";
    return kExitDomain;
  }
  return 0;
}

// ---- align ----------------------------------------------------------------

struct AlignArgs {
  std::string pred;
  std::string pred_cam;
  std::string gt_cam;
  std::string extrinsics;
  std::string like;
  int height = 0;
  int width = 0;
  std::string out;
};

int run_align(const AlignArgs& a) {
  const dfd::DepthMap pred = dfd::read_depth(a.pred);
  int h = a.height;
  int w = a.width;
  if (!a.like.empty()) {
    const dfd::DepthMap ref = dfd::read_depth(a.like);
    h = ref.height();
    w = ref.width();
  }
  if (h <= 0 || w <= 0) {
    std::cerr << "align: give --like or both --height and --width\n";
    throw Exit{kExitUsage};
  }
  const dfd::RigidTransform t =
      a.extrinsics.empty() ? dfd::RigidTransform::identity() : dfd::read_extrinsics(a.extrinsics);
  t.validate();
  const dfd::PointCloud cloud = dfd::transform_points(dfd::unproject(pred, dfd::read_intrinsics(a.pred_cam)), t);
  const dfd::Projection proj = dfd::project_depth(cloud, dfd::read_intrinsics(a.gt_cam), h, w);
  ensure_parent(a.out);
  dfd::write_pfm(a.out, proj.depth);
  std::cerr << "align: " << cloud.size() << " points, " << proj.dropped << " dropped\n";
  write_manifest(manifest_path_for(a.out), "align", {{"height", h}, {"width", w}, {"dropped", proj.dropped}},
                 nonempty({a.pred, a.pred_cam, a.gt_cam, a.extrinsics, a.like}), {a.out});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric depth from a defocus pair: synthesis, rendering, solving and evaluation.", "dfd"};
  app.set_version_flag("--version", dfd::kToolVersion);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: DFD_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "generate a scene and simulated captures");
  add_scene_options(c_synth, synth.scene);
  c_synth->add_option("--cam-aif", synth.cam_aif, "AIF camera JSON (default: 50 mm, f/22, focus 0.8 m)");
  c_synth->add_option("--f-stops", synth.f_stops, "f-stops to simulate")->capture_default_str();
  add_psf_options(c_synth, synth.psf);
  c_synth->add_option("--out", synth.out, "output directory")->required();

  RenderArgs render;
  auto* c_render = app.add_subcommand("render", "render a defocused image from an AIF image and depth");
  c_render->add_option("--aif", render.aif)->required()->check(CLI::ExistingFile);
  c_render->add_option("--depth", render.depth)->required()->check(CLI::ExistingFile);
  c_render->add_option("--cam", render.cam, "camera JSON")->required()->check(CLI::ExistingFile);
  add_psf_options(c_render, render.psf);
  c_render->add_option("--out", render.out, "output PFM")->required();

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "recover metric depth from an AIF/blurred pair");
  c_solve->add_option("--aif", solve.aif)->required()->check(CLI::ExistingFile);
  c_solve->add_option("--blur", solve.blur)->required()->check(CLI::ExistingFile);
  c_solve->add_option("--cam-aif", solve.cam_aif)->required()->check(CLI::ExistingFile);
  c_solve->add_option("--cam-blur", solve.cam_blur)->required()->check(CLI::ExistingFile);
  add_solve_options(c_solve, solve.opt, true);
  c_solve->add_option("--seed", solve.opt.cfg.seed, "latent initialization seed")->capture_default_str();
  c_solve->add_option("--out-depth", solve.out_depth, "metric depth PFM")->required();
  c_solve->add_option("--out-report", solve.out_report, "JSON report with alpha, beta and loss trace");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "depth metrics, optionally after reprojection");
  c_eval->add_option("--pred", eval.pred)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--gt", eval.gt)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--pred-cam", eval.pred_cam, "intrinsics JSON of the predicted map")->check(CLI::ExistingFile);
  c_eval->add_option("--gt-cam", eval.gt_cam, "intrinsics JSON of the ground-truth map")->check(CLI::ExistingFile);
  c_eval->add_option("--extrinsics", eval.extrinsics, "pred-to-gt rigid transform JSON")->check(CLI::ExistingFile);
  c_eval->add_option("--scene", eval.scene, "scene label (default: stem of --pred)");
  c_eval->add_option("--out", eval.out, "CSV output (default: stdout)");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "aperture sweep on a synthetic scene");
  add_scene_options(c_sweep, sweep.scene);
  c_sweep->add_option("--cam-aif", sweep.cam_aif, "AIF camera JSON; its f-stop must exceed every swept one");
  c_sweep->add_option("--f-stops", sweep.f_stops)->capture_default_str();
  add_solve_options(c_sweep, sweep.opt, false);
  c_sweep->add_option("--out", sweep.out, "CSV output")->capture_default_str();

  GradcheckArgs grad;
  auto* c_grad = app.add_subcommand("gradcheck", "compare the analytic depth gradient to central differences");
  c_grad->add_option("--size", grad.size, "scene side length, px")->check(CLI::Range(2, 512))->capture_default_str();
  c_grad->add_option("--seed", grad.seed)->capture_default_str();
  c_grad->add_option("--tol", grad.tol)->capture_default_str();
  c_grad->add_option("--probes", grad.probes)->capture_default_str();
  c_grad->add_option("--step", grad.step, "relative central-difference step")->capture_default_str();
  c_grad->add_option("--f-stop", grad.f_stop)->capture_default_str();
  c_grad->add_option("--cam", grad.cam, "camera JSON (overrides --f-stop)")->check(CLI::ExistingFile);
  add_psf_options(c_grad, grad.psf);
  c_grad->add_option("--out", grad.out, "also write the JSON line here");

  AlignArgs align;
  auto* c_align = app.add_subcommand("align", "reproject a depth map into another camera");
  c_align->add_option("--pred", align.pred)->required()->check(CLI::ExistingFile);
  c_align->add_option("--pred-cam", align.pred_cam)->required()->check(CLI::ExistingFile);
  c_align->add_option("--gt-cam", align.gt_cam)->required()->check(CLI::ExistingFile);
  c_align->add_option("--extrinsics", align.extrinsics)->check(CLI::ExistingFile);
  c_align->add_option("--like", align.like, "depth map whose shape the output takes")->check(CLI::ExistingFile);
  c_align->add_option("--height", align.height);
  c_align->add_option("--width", align.width);
  c_align->add_option("--out", align.out, "output PFM")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cerr, std::cerr);
    if (argc == 1) std::cerr << app.help();
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (threads > 0) dfd::set_thread_count(threads);
    if (*c_synth) return run_synth(synth);
    if (*c_render) return run_render(render);
    if (*c_solve) return run_solve(solve);
    if (*c_eval) return run_eval(eval);
    if (*c_sweep) return run_sweep(sweep);
    if (*c_grad) return run_gradcheck(grad);
    if (*c_align) return run_align(align);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "dfd: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
