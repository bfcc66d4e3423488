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

#include "dfd/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dfd/errors.hpp"
#include "dfd/parallel.hpp"

namespace dfd {

namespace {

// Gaussian tails beyond 9 sigma are below 3e-18 of the peak.
constexpr double kGaussianSupportSigmas = 9.0;
constexpr double kMinSigma = 1e-6;

}  // namespace

// Per-source kernel parameters plus the forward results needed by vjp().
//
// For source u with CoC c_u the un-normalized weight at offset o is
//   Disc:     W = clamp((c_u + 1)/2 - |o|, 0, 1)
//   Gaussian: W = g_u(o_y) g_u(o_x),  g_u(k) = exp(-k^2 / (2 sigma_u^2))
// and h_u(o) = W / Z_u. dW/dc and dZ/dc are kept for the backward pass.
struct DefocusRenderer::State {
  int height = 0;
  int width = 0;
  int channels = 1;
  int radius = 0;  // gather radius shared by every source

  std::vector<double> half;      // Disc: (c + 1) / 2
  std::vector<double> inv_z;     // 1 / Z_u
  std::vector<double> dz_dc;     // dZ_u / dc
  std::vector<double> dcoc;      // dc_u / d depth_u (0 where clamped)
  std::vector<double> sigma;     // Gaussian only
  std::vector<double> gauss;     // Gaussian only: (radius + 1) entries per source
  std::vector<double> offset_m;  // |o| for o in [-radius, radius]^2

  ImageBuffer output;
  std::vector<double> denom;

  std::size_t side() const { return static_cast<std::size_t>(2 * radius + 1); }
  double m(int oy, int ox) const { return offset_m[(oy + radius) * side() + (ox + radius)]; }
};

DefocusRenderer::DefocusRenderer(ImageBuffer aif, CameraConfig cam, PsfModel model)
    : aif_(std::move(aif)), cam_(cam), model_(model) {
  cam_.validate();
  model_.validate();
  aif_.validate();
}

DefocusRenderer::~DefocusRenderer() = default;
DefocusRenderer::DefocusRenderer(DefocusRenderer&&) noexcept = default;
DefocusRenderer& DefocusRenderer::operator=(DefocusRenderer&&) noexcept = default;

ImageBuffer DefocusRenderer::render(const DepthMap& depth) {
  if (!depth.same_shape(aif_)) {
    throw ShapeError("render_blur: depth is " + std::to_string(depth.height()) + "x" +
                     std::to_string(depth.width()) + " but image is " + std::to_string(aif_.height()) +
                     "x" + std::to_string(aif_.width()));
  }
  const double floor = cam_.min_depth();
  for (double d : depth.data()) {
    if (!(d > floor) || !std::isfinite(d)) {
      throw DomainError("render_blur: depth " + std::to_string(d) + " m out of range (floor " +
                        std::to_string(floor) + " m)");
    }
  }

  auto st = std::make_unique<State>();
  st->height = aif_.height();
  st->width = aif_.width();
  st->channels = aif_.channels();
  const std::size_t n = depth.size();
  const int window_radius = (cam_.max_window_px - 1) / 2;
  const bool disc = model_.variant == PsfVariant::Disc;

  std::vector<double> coc(n);
  std::vector<int> support(n);
  st->dcoc.resize(n);
  st->sigma.assign(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    const CocSample s = clamped_coc(depth[u], cam_);
    coc[u] = s.coc;
    st->dcoc[u] = s.dcoc_ddepth;
    if (disc) {
      support[u] = std::min(window_radius, static_cast<int>(std::ceil((s.coc + 1.0) / 2.0)));
    } else {
      st->sigma[u] = model_.gaussian_sigma_ratio * s.coc;
      support[u] = st->sigma[u] < kMinSigma
                       ? 0
                       : std::min(window_radius,
                                  static_cast<int>(std::ceil(kGaussianSupportSigmas * st->sigma[u])));
    }
  }
  st->radius = *std::max_element(support.begin(), support.end());
  const int radius = st->radius;

  st->offset_m.resize(st->side() * st->side());
  for (int oy = -radius; oy <= radius; ++oy) {
    for (int ox = -radius; ox <= radius; ++ox) {
      st->offset_m[(oy + radius) * st->side() + (ox + radius)] =
          std::sqrt(static_cast<double>(oy * oy + ox * ox));
    }
  }

  st->inv_z.resize(n);
  st->dz_dc.resize(n);
  if (disc) {
    st->half.resize(n);
    for (std::size_t u = 0; u < n; ++u) {
      const double h = (coc[u] + 1.0) / 2.0;
      const int r = support[u];
      double z = 0.0;
      double rim = 0.0;
      for (int oy = -r; oy <= r; ++oy) {
        for (int ox = -r; ox <= r; ++ox) {
          const double t = h - st->m(oy, ox);
          z += std::clamp(t, 0.0, 1.0);
          if (t >= 0.0 && t <= 1.0) rim += 1.0;
        }
      }
      st->half[u] = h;
      st->inv_z[u] = 1.0 / z;
      st->dz_dc[u] = 0.5 * rim;
    }
  } else {
    const double ratio = model_.gaussian_sigma_ratio;
    st->gauss.assign(n * (radius + 1), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      double* g = &st->gauss[u * (radius + 1)];
      const double sig = st->sigma[u];
      g[0] = 1.0;
      double s = 1.0;
      double ds = 0.0;  // d s / d c
      if (sig >= kMinSigma) {
        for (int k = 1; k <= support[u]; ++k) {
          g[k] = std::exp(-static_cast<double>(k * k) / (2.0 * sig * sig));
          s += 2.0 * g[k];
          ds += 2.0 * g[k] * k * k * ratio / (sig * sig * sig);
        }
      }
      st->inv_z[u] = 1.0 / (s * s);
      st->dz_dc[u] = 2.0 * s * ds;
    }
  }

  const int height = st->height;
  const int width = st->width;
  const int channels = st->channels;
  st->output = ImageBuffer(height, width, channels);
  st->denom.assign(n, 0.0);
  const State& s = *st;
  ImageBuffer& out = st->output;
  std::vector<double>& denom = st->denom;
  const auto aif = aif_.data();

  parallel_for(0, height, [&](int y0, int y1) {
    std::vector<double> acc(channels);
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < width; ++x) {
        std::fill(acc.begin(), acc.end(), 0.0);
        double den = 0.0;
        for (int oy = -radius; oy <= radius; ++oy) {
          const int uy = y - oy;
          if (uy < 0 || uy >= height) continue;
          for (int ox = -radius; ox <= radius; ++ox) {
            const int ux = x - ox;
            if (ux < 0 || ux >= width) continue;
            const std::size_t u = static_cast<std::size_t>(uy) * width + ux;
            double w;
            if (disc) {
              w = std::clamp(s.half[u] - s.m(oy, ox), 0.0, 1.0);
            } else {
              const double* g = &s.gauss[u * (radius + 1)];
              w = g[std::abs(oy)] * g[std::abs(ox)];
            }
            if (w == 0.0) continue;
            w *= s.inv_z[u];
            den += w;
            for (int c = 0; c < channels; ++c) acc[c] += w * aif[u * channels + c];
          }
        }
        const std::size_t i = static_cast<std::size_t>(y) * width + x;
        denom[i] = den;
        for (int c = 0; c < channels; ++c) out.at(y, x, c) = acc[c] / den;
      }
    }
  });

  state_ = std::move(st);
  return state_->output;
}

DepthMap DefocusRenderer::vjp(const ImageBuffer& upstream) const {
  if (!state_) throw std::logic_error("DefocusRenderer::vjp called before render");
  const State& s = *state_;
  if (!upstream.same_shape(s.output)) throw ShapeError("render_blur_vjp: upstream shape mismatch");

  const int height = s.height;
  const int width = s.width;
  const int channels = s.channels;
  const int radius = s.radius;
  const bool disc = model_.variant == PsfVariant::Disc;
  const double ratio = model_.gaussian_sigma_ratio;
  const std::size_t n = static_cast<std::size_t>(height) * width;

  // out_i = N_i / D_i, so d out_i / d h_u(i) = (x_u - out_i) / D_i. With
  // q_i = G_i / D_i and r_i = <q_i, out_i> the channel sum collapses to
  // <q_i, x_u> - r_i.
  std::vector<double> q(n * channels);
  std::vector<double> r(n, 0.0);
  const auto up = upstream.data();
  const auto outv = s.output.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      q[i * channels + c] = up[i * channels + c] / s.denom[i];
      r[i] += q[i * channels + c] * outv[i * channels + c];
    }
  }

  DepthMap grad(height, width, 0.0);
  const auto aif = aif_.data();
  parallel_for(0, height, [&](int y0, int y1) {
    for (int uy = y0; uy < y1; ++uy) {
      for (int ux = 0; ux < width; ++ux) {
        const std::size_t u = static_cast<std::size_t>(uy) * width + ux;
        if (s.dcoc[u] == 0.0) continue;
        const double inv_z = s.inv_z[u];
        const double zc = s.dz_dc[u] * inv_z * inv_z;
        const double* g = disc ? nullptr : &s.gauss[u * (radius + 1)];
        const double sig = disc ? 0.0 : s.sigma[u];
        if (!disc && sig < kMinSigma) continue;
        const double sig3 = sig * sig * sig;

        double acc = 0.0;
        for (int oy = -radius; oy <= radius; ++oy) {
          const int y = uy + oy;
          if (y < 0 || y >= height) continue;
          for (int ox = -radius; ox <= radius; ++ox) {
            const int x = ux + ox;
            if (x < 0 || x >= width) continue;
            double w;
            double wc;
            if (disc) {
              const double t = s.half[u] - s.m(oy, ox);
              if (t < 0.0) continue;
              w = std::min(t, 1.0);
              wc = t <= 1.0 ? 0.5 : 0.0;
            } else {
              w = g[std::abs(oy)] * g[std::abs(ox)];
              if (w == 0.0) continue;
              wc = w * static_cast<double>(oy * oy + ox * ox) * ratio / sig3;
            }
            const double dh = wc * inv_z - w * zc;
            if (dh == 0.0) continue;
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            double sens = -r[i];
            for (int c = 0; c < channels; ++c) sens += q[i * channels + c] * aif[u * channels + c];
            acc += sens * dh;
          }
        }
        grad[u] = acc * s.dcoc[u];
      }
    }
  });
  return grad;
}

ImageBuffer render_blur(const ImageBuffer& aif, const DepthMap& depth, const CameraConfig& cam,
                        const PsfModel& model) {
  DefocusRenderer renderer(aif, cam, model);
  return renderer.render(depth);
}

double energy_scale(const CameraConfig& aif_cfg, const CameraConfig& blur_cfg) {
  aif_cfg.validate();
  blur_cfg.validate();
  return (aif_cfg.exposure_s / blur_cfg.exposure_s) *
         (blur_cfg.f_stop * blur_cfg.f_stop / (aif_cfg.f_stop * aif_cfg.f_stop));
}

void CapturePair::validate() const {
  aif.camera.validate();
  blurred.camera.validate();
  if (!aif.image.same_shape(blurred.image)) {
    throw ShapeError("capture pair images must share height, width and channels");
  }
  if (!(aif.camera.f_stop > blurred.camera.f_stop)) {
    throw DomainError("the all-in-focus capture must use a larger f-stop than the blurred one");
  }
}

CapturePair normalize_capture(const CapturePair& pair) {
  pair.validate();
  CapturePair out = pair;
  const double k = energy_scale(pair.aif.camera, pair.blurred.camera);
  for (double& v : out.blurred.image.data()) v *= k;
  return out;
}

}  // namespace dfd
