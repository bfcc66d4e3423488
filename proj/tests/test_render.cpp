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

#include <random>

#include "dfd/errors.hpp"
#include "dfd/parallel.hpp"
#include "dfd/render.hpp"
#include "test_util.hpp"

namespace dfd {

void PrintTo(PsfVariant v, std::ostream* os) { *os << (v == PsfVariant::Disc ? "disc" : "gaussian"); }

namespace {

using testing::dense_convolution;
using testing::gather_oracle;
using testing::max_abs_diff;
using testing::reference_camera;

class RenderModels : public ::testing::TestWithParam<PsfVariant> {
 protected:
  PsfModel model() const { return GetParam() == PsfVariant::Disc ? PsfModel::disc() : PsfModel::gaussian(); }
};

TEST_P(RenderModels, ConstantDepthMatchesDenseConvolution) {
  std::mt19937_64 rng(11);
  const CameraConfig cam = reference_camera();
  for (double d : {0.6, 1.1, 2.0}) {
    const ImageBuffer img = testing::random_image(20, 23, 3, rng);
    const DepthMap depth(20, 23, d);
    const ImageBuffer got = render_blur(img, depth, cam, model());
    const ImageBuffer want = dense_convolution(img, build_kernel(d, cam, model()));
    EXPECT_LT(max_abs_diff(got, want), 1e-12) << d;
  }
}

TEST_P(RenderModels, VaryingDepthMatchesGatherOracle) {
  std::mt19937_64 rng(12);
  const CameraConfig cam = reference_camera();
  const ImageBuffer img = testing::random_image(17, 19, 3, rng);
  const DepthMap depth = testing::random_depth(17, 19, rng, 0.5, 3.0);
  const ImageBuffer got = render_blur(img, depth, cam, model());
  const ImageBuffer want = gather_oracle(img, depth, cam, model());
  EXPECT_LT(max_abs_diff(got, want), 1e-12);
}

TEST_P(RenderModels, ClampedDepthsMatchGatherOracle) {
  std::mt19937_64 rng(13);
  CameraConfig cam = reference_camera(2.0);
  cam.max_window_px = 15;
  const ImageBuffer img = testing::random_image(12, 12, 1, rng);
  const DepthMap depth = testing::random_depth(12, 12, rng, 0.3, 4.0);
  EXPECT_LT(max_abs_diff(render_blur(img, depth, cam, model()), gather_oracle(img, depth, cam, model())), 1e-12);
}

TEST_P(RenderModels, ConstantImageStaysConstant) {
  std::mt19937_64 rng(14);
  const CameraConfig cam = reference_camera();
  const ImageBuffer img(16, 16, 1, 0.37);
  const DepthMap depth = testing::random_depth(16, 16, rng, 0.4, 5.0);
  const ImageBuffer out = render_blur(img, depth, cam, model());
  for (double v : out.data()) EXPECT_NEAR(v, 0.37, 1e-14);
}

TEST_P(RenderModels, InFocusIsIdentity) {
  std::mt19937_64 rng(15);
  const CameraConfig cam = reference_camera();
  const ImageBuffer img = testing::random_image(9, 11, 3, rng);
  const DepthMap depth(9, 11, cam.focus_distance_m);
  EXPECT_LT(max_abs_diff(render_blur(img, depth, cam, model()), img), 1e-15);
}

TEST_P(RenderModels, ConstantDepthConservesInteriorFlux) {
  // A single bright pixel far from the border keeps its total energy.
  const CameraConfig cam = reference_camera();
  ImageBuffer img(41, 41, 1, 0.0);
  img.at(20, 20) = 1.0;
  const ImageBuffer out = render_blur(img, DepthMap(41, 41, 1.0), cam, model());
  double total = 0.0;
  for (double v : out.data()) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST_P(RenderModels, ThreadCountDoesNotChangeOutput) {
  std::mt19937_64 rng(16);
  const CameraConfig cam = reference_camera();
  const ImageBuffer img = testing::random_image(24, 24, 1, rng);
  const DepthMap depth = testing::random_depth(24, 24, rng, 0.5, 3.0);
  const int saved = thread_count();
  set_thread_count(1);
  const ImageBuffer a = render_blur(img, depth, cam, model());
  set_thread_count(3);
  const ImageBuffer b = render_blur(img, depth, cam, model());
  set_thread_count(saved);
  EXPECT_EQ(a, b);
}

INSTANTIATE_TEST_SUITE_P(Psf, RenderModels, ::testing::Values(PsfVariant::Disc, PsfVariant::Gaussian),
                         [](const auto& info) { return info.param == PsfVariant::Disc ? "Disc" : "Gaussian"; });

TEST(Render, RejectsShapeMismatch) {
  const ImageBuffer img(8, 8, 1, 0.5);
  EXPECT_THROW(render_blur(img, DepthMap(8, 9, 1.0), CameraConfig{}, PsfModel::disc()), ShapeError);
}

TEST(Render, RejectsDepthAtNearFloor) {
  const CameraConfig cam;
  const ImageBuffer img(4, 4, 1, 0.5);
  DepthMap depth(4, 4, 1.0);
  depth.at(2, 1) = cam.min_depth();
  EXPECT_THROW(render_blur(img, depth, cam, PsfModel::disc()), DomainError);
}

TEST(Render, VjpRequiresRender) {
  DefocusRenderer r(ImageBuffer(4, 4, 1, 0.5), CameraConfig{}, PsfModel::disc());
  EXPECT_THROW(r.vjp(ImageBuffer(4, 4, 1, 1.0)), std::logic_error);
}

TEST(Render, EnergyScale) {
  CameraConfig aif;
  aif.f_stop = 22.0;
  CameraConfig blur;
  blur.f_stop = 8.0;
  EXPECT_NEAR(energy_scale(aif, blur), 0.132231404958677685950, 1e-15);
  blur.exposure_s = 0.5;
  EXPECT_NEAR(energy_scale(aif, blur), 2.0 * 64.0 / 484.0, 1e-15);
}

TEST(Render, NormalizeCaptureScalesBlurredOnly) {
  CapturePair pair;
  pair.aif = {ImageBuffer(3, 3, 1, 0.2), CameraConfig{}.with_f_stop(22.0)};
  pair.blurred = {ImageBuffer(3, 3, 1, 1.0), CameraConfig{}.with_f_stop(8.0)};
  const CapturePair n = normalize_capture(pair);
  EXPECT_EQ(n.aif.image, pair.aif.image);
  for (double v : n.blurred.image.data()) EXPECT_NEAR(v, 64.0 / 484.0, 1e-15);
}

TEST(Render, CapturePairValidation) {
  CapturePair pair;
  pair.aif = {ImageBuffer(3, 3, 1, 0.2), CameraConfig{}.with_f_stop(8.0)};
  pair.blurred = {ImageBuffer(3, 3, 1, 1.0), CameraConfig{}.with_f_stop(8.0)};
  EXPECT_THROW(pair.validate(), DomainError);
  pair.aif.camera.f_stop = 22.0;
  EXPECT_NO_THROW(pair.validate());
  pair.blurred.image = ImageBuffer(3, 4, 1, 1.0);
  EXPECT_THROW(pair.validate(), ShapeError);
}

}  // namespace
}  // namespace dfd
