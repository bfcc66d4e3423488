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

#include <bit>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dfd/config_io.hpp"
#include "dfd/errors.hpp"
#include "dfd/eval.hpp"
#include "dfd/image_io.hpp"
#include "dfd/manifest.hpp"

namespace dfd {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dfd_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

TEST(Pfm, ImageRoundTrip) {
  std::mt19937_64 rng(1);
  ImageBuffer img(5, 7, 3);
  for (double& v : img.data()) v = static_cast<float>(std::uniform_real_distribution<double>(0, 2)(rng));
  write_pfm(scratch("img.pfm"), img);
  EXPECT_EQ(read_pfm_image(scratch("img.pfm")), img);
  EXPECT_EQ(read_image(scratch("img.pfm")), img);
}

TEST(Pfm, DepthRoundTripAndLayout) {
  DepthMap d(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  write_pfm(scratch("d.pfm"), d);
  EXPECT_EQ(read_pfm_depth(scratch("d.pfm")), d);

  const std::string bytes = slurp(scratch("d.pfm"));
  const std::string header = "Pf\n3 2\n-1.0\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  // Rows are stored bottom to top, little endian.
  float first;
  std::memcpy(&first, bytes.data() + header.size(), sizeof(float));
  EXPECT_EQ(first, 4.0f);
}

TEST(Pfm, ReadsBigEndian) {
  std::string bytes = "Pf\n2 1\n1.0\n";
  for (float f : {0.25f, 8.0f}) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(f);
    for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<char>((u >> s) & 0xff));
  }
  spit(scratch("be.pfm"), bytes);
  const DepthMap d = read_pfm_depth(scratch("be.pfm"));
  EXPECT_EQ(d.at(0, 0), 0.25);
  EXPECT_EQ(d.at(0, 1), 8.0);
}

TEST(Pfm, RejectsMalformedFiles) {
  spit(scratch("bad.pfm"), "P6\n2 2\n255\n");
  EXPECT_THROW(read_pfm_image(scratch("bad.pfm")), FormatError);
  spit(scratch("short.pfm"), "Pf\n4 4\n-1.0\nabc");
  EXPECT_THROW(read_pfm_depth(scratch("short.pfm")), FormatError);
  write_pfm(scratch("rgb.pfm"), ImageBuffer(2, 2, 3, 0.5));
  EXPECT_THROW(read_pfm_depth(scratch("rgb.pfm")), FormatError);
  EXPECT_THROW(read_pfm_depth(scratch("missing.pfm")), FormatError);
}

TEST(Png16, MillimeterConvention) {
  DepthMap d(2, 2, std::vector<double>{2.0, 0.0, 1.234, 65.535});
  write_png16_depth(scratch("d.png"), d);
  const DepthMap back = read_png16_depth(scratch("d.png"));
  EXPECT_EQ(back.at(0, 0), 2.0);
  EXPECT_EQ(back.at(0, 1), 0.0);
  EXPECT_NEAR(back.at(1, 0), 1.234, 1e-12);
  EXPECT_NEAR(back.at(1, 1), 65.535, 1e-12);
  EXPECT_EQ(read_depth(scratch("d.png")), back);
}

TEST(Png, SrgbLinearization) {
  EXPECT_EQ(srgb_to_linear(0.0), 0.0);
  EXPECT_NEAR(srgb_to_linear(1.0), 1.0, 1e-15);
  EXPECT_NEAR(srgb_to_linear(0.5), 0.21404114048223255, 1e-12);
  EXPECT_NEAR(srgb_to_linear(0.04), 0.04 / 12.92, 1e-15);
}

TEST(Config, CameraRoundTrip) {
  CameraConfig cam;
  cam.f_stop = 13.0;
  cam.pixel_pitch_m = 3.197030195381883e-5;
  write_json_file(scratch("cam.json"), nlohmann::json(cam));
  EXPECT_EQ(read_camera(scratch("cam.json")), cam);
  const nlohmann::json j = read_json_file(scratch("cam.json"));
  for (const char* key : {"focal_length_m", "focus_distance_m", "f_stop", "pixel_pitch_m", "exposure_s",
                          "max_window_px"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Config, CameraErrors) {
  spit(scratch("nokey.json"), R"({"focal_length_m": 0.05})");
  EXPECT_THROW(read_camera(scratch("nokey.json")), FormatError);
  spit(scratch("garbage.json"), "{not json");
  EXPECT_THROW(read_camera(scratch("garbage.json")), FormatError);
  spit(scratch("badcam.json"), R"({"focal_length_m": 0.05, "focus_distance_m": 0.01, "f_stop": 8,
    "pixel_pitch_m": 1e-5, "exposure_s": 1, "max_window_px": 63})");
  EXPECT_THROW(read_camera(scratch("badcam.json")), DomainError);
}

TEST(Config, IntrinsicsAndExtrinsics) {
  spit(scratch("k.json"), R"({"fx": 500, "fy": 510, "cx": 320, "cy": 240, "distortion": [0.1, -0.05]})");
  const Intrinsics k = read_intrinsics(scratch("k.json"));
  EXPECT_EQ(k.fy, 510.0);
  EXPECT_EQ(k.distortion[0], 0.1);
  EXPECT_EQ(k.distortion[1], -0.05);
  EXPECT_EQ(k.distortion[4], 0.0);

  spit(scratch("t.json"), R"({"rotation": [0, -1, 0, 1, 0, 0, 0, 0, 1], "translation": [0.1, 0.2, 0.3]})");
  const RigidTransform t = read_extrinsics(scratch("t.json"));
  EXPECT_EQ(t.rotation(0, 1), -1.0);
  EXPECT_EQ(t.rotation(1, 0), 1.0);
  EXPECT_EQ(t.translation.z(), 0.3);

  spit(scratch("t_bad.json"), R"({"rotation": [1, 0, 0, 0, 1, 0, 0, 0, 2], "translation": [0, 0, 0]})");
  EXPECT_THROW(read_extrinsics(scratch("t_bad.json")), DomainError);
  spit(scratch("t_short.json"), R"({"rotation": [1, 0, 0], "translation": [0, 0, 0]})");
  EXPECT_THROW(read_extrinsics(scratch("t_short.json")), FormatError);
}

TEST(Config, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::bit_cast<double>(rng() & 0x7fefffffffffffffULL);
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_double(8.0), "8");
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Manifest, HashesAndDeterminism) {
  spit(scratch("abc.txt"), "abc");
  EXPECT_EQ(sha256_file(scratch("abc.txt")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  RunManifest m;
  m.command = "render";
  m.config = {{"iters", 3}};
  m.inputs = {scratch("abc.txt")};
  m.write(scratch("m1.json"));
  m.write(scratch("m2.json"));
  EXPECT_EQ(slurp(scratch("m1.json")), slurp(scratch("m2.json")));
  const nlohmann::json j = read_json_file(scratch("m1.json"));
  EXPECT_EQ(j["version"], kToolVersion);
  EXPECT_EQ(j["inputs"][0]["sha256"], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace dfd
