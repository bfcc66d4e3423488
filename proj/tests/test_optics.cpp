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

#include <cmath>

#include "dfd/errors.hpp"
#include "dfd/optics.hpp"
#include "test_util.hpp"

namespace dfd {
namespace {

// Reference values below were computed with 40-digit arithmetic for
// f = 0.05, F = 0.8, N = 8, s = 6.41e-6.
constexpr double kCocAt2m = 39.0015600624024960998;
constexpr double kAsymptote = 65.0026001040041601664;
constexpr double kSlopeAt1p6 = 20.3133125325013000520;

TEST(Optics, CocMatchesReference) {
  CameraConfig cam;
  EXPECT_NEAR(coc_diameter(2.0, cam), kCocAt2m, 1e-12);
  EXPECT_NEAR(cam.coc_asymptote(), kAsymptote, 1e-12);
  EXPECT_NEAR(coc_derivative(1.6, cam), kSlopeAt1p6, 1e-12);
}

TEST(Optics, CocIsZeroAtFocusAndSymmetricInSign) {
  CameraConfig cam;
  EXPECT_DOUBLE_EQ(coc_diameter(cam.focus_distance_m, cam), 0.0);
  EXPECT_GT(coc_diameter(0.6, cam), 0.0);
  EXPECT_LT(coc_derivative(0.6, cam), 0.0);
  EXPECT_GT(coc_derivative(1.2, cam), 0.0);
}

TEST(Optics, CocApproachesAsymptote) {
  CameraConfig cam;
  EXPECT_NEAR(coc_diameter(1e6, cam), cam.coc_asymptote(), 1e-3);
  EXPECT_LT(coc_diameter(1e6, cam), cam.coc_asymptote());
}

TEST(Optics, DerivativeMatchesCentralDifference) {
  CameraConfig cam;
  for (double d : {0.2, 0.5, 0.79, 0.81, 1.3, 2.0, 5.0}) {
    const double fd = testing::central_difference([&](double x) { return coc_diameter(x, cam); }, d, 1e-7);
    EXPECT_NEAR(coc_derivative(d, cam), fd, 1e-5 * std::max(1.0, std::abs(fd))) << d;
  }
}

TEST(Optics, CocBelowNearFloorThrows) {
  CameraConfig cam;
  EXPECT_THROW(coc_diameter(cam.min_depth(), cam), DomainError);
  EXPECT_THROW(coc_diameter(0.01, cam), DomainError);
  EXPECT_NO_THROW(coc_diameter(cam.min_depth() * 1.0001, cam));
}

TEST(Optics, ClampedCocZeroesDerivative) {
  CameraConfig cam;
  cam.max_window_px = 21;
  const CocSample far = clamped_coc(5.0, cam);
  EXPECT_TRUE(far.clamped);
  EXPECT_DOUBLE_EQ(far.coc, 19.0);
  EXPECT_DOUBLE_EQ(far.dcoc_ddepth, 0.0);

  const CocSample near = clamped_coc(0.85, cam);
  EXPECT_FALSE(near.clamped);
  EXPECT_DOUBLE_EQ(near.coc, coc_diameter(0.85, cam));
  EXPECT_DOUBLE_EQ(near.dcoc_ddepth, coc_derivative(0.85, cam));
}

TEST(Optics, EffectivePitch) {
  EXPECT_NEAR(effective_pixel_pitch(6.41e-6, 5616, 1126), 3.197030195381883e-5, 1e-18);
  EXPECT_THROW(effective_pixel_pitch(6.41e-6, 0, 10), DomainError);
}

TEST(Optics, CameraValidation) {
  CameraConfig cam;
  EXPECT_NO_THROW(cam.validate());
  CameraConfig bad = cam;
  bad.focus_distance_m = 0.04;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = cam;
  bad.max_window_px = 64;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = cam;
  bad.f_stop = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = cam;
  bad.pixel_pitch_m = -1.0;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Optics, DiscWeightPiecewise) {
  EXPECT_DOUBLE_EQ(disc_weight(0.0, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(disc_weight(0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(disc_weight(2.0, 4.0), 0.5);
  EXPECT_DOUBLE_EQ(disc_weight(3.0, 4.0), 0.0);
  EXPECT_DOUBLE_EQ(disc_weight(1.0, 4.0), 1.0);
  EXPECT_DOUBLE_EQ(disc_weight(2.25, 4.0), 0.25);
  EXPECT_DOUBLE_EQ(disc_weight_slope(2.25, 4.0), 0.5);
  EXPECT_DOUBLE_EQ(disc_weight_slope(0.0, 4.0), 0.0);
  EXPECT_DOUBLE_EQ(disc_weight_slope(5.0, 4.0), 0.0);
}

TEST(Optics, KernelsSumToOne) {
  const CameraConfig cam = testing::reference_camera();
  for (PsfModel model : {PsfModel::disc(), PsfModel::gaussian()}) {
    for (double d : {0.3, 0.7, 0.8, 0.95, 1.6, 2.8, 10.0}) {
      const PsfKernel k = build_kernel(d, cam, model);
      EXPECT_NEAR(k.sum(), 1.0, 1e-12) << d;
      EXPECT_EQ(k.size, 2 * k.center + 1);
      for (double w : k.weights) EXPECT_GE(w, 0.0);
    }
  }
}

TEST(Optics, InFocusKernelIsIdentity) {
  const CameraConfig cam = testing::reference_camera();
  for (PsfModel model : {PsfModel::disc(), PsfModel::gaussian()}) {
    const PsfKernel k = build_kernel(cam.focus_distance_m, cam, model);
    EXPECT_NEAR(k.at(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(k.sum() - k.at(0, 0), 0.0, 1e-12);
  }
}

TEST(Optics, DiscKernelIsRadiallySymmetric) {
  const CameraConfig cam = testing::reference_camera();
  const PsfKernel k = build_kernel(2.0, cam, PsfModel::disc());
  const int r = k.center;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      EXPECT_DOUBLE_EQ(k.at(dy, dx), k.at(-dy, dx));
      EXPECT_DOUBLE_EQ(k.at(dy, dx), k.at(dx, dy));
    }
  }
  EXPECT_GT(k.at(0, 0), 0.0);
}

TEST(Optics, KernelGrowsWithDefocus) {
  const CameraConfig cam = testing::reference_camera();
  const PsfKernel a = build_kernel(1.0, cam, PsfModel::disc());
  const PsfKernel b = build_kernel(3.0, cam, PsfModel::disc());
  EXPECT_GT(b.coc, a.coc);
  EXPECT_LT(b.at(0, 0), a.at(0, 0));
}

TEST(Optics, GaussianRatioValidated) {
  EXPECT_THROW(PsfModel::gaussian(0.0).validate(), DomainError);
  EXPECT_NO_THROW(PsfModel::gaussian(0.25).validate());
}

}  // namespace
}  // namespace dfd
