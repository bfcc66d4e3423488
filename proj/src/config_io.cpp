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

#include "dfd/config_io.hpp"

#include <charconv>
#include <fstream>

#include "dfd/errors.hpp"

namespace dfd {

void to_json(nlohmann::json& j, const CameraConfig& cam) {
  j = nlohmann::json{{"focal_length_m", cam.focal_length_m},
                     {"focus_distance_m", cam.focus_distance_m},
                     {"f_stop", cam.f_stop},
                     {"pixel_pitch_m", cam.pixel_pitch_m},
                     {"exposure_s", cam.exposure_s},
                     {"max_window_px", cam.max_window_px}};
}

void from_json(const nlohmann::json& j, CameraConfig& cam) {
  j.at("focal_length_m").get_to(cam.focal_length_m);
  j.at("focus_distance_m").get_to(cam.focus_distance_m);
  j.at("f_stop").get_to(cam.f_stop);
  j.at("pixel_pitch_m").get_to(cam.pixel_pitch_m);
  j.at("exposure_s").get_to(cam.exposure_s);
  j.at("max_window_px").get_to(cam.max_window_px);
  cam.validate();
}

void to_json(nlohmann::json& j, const Intrinsics& k) {
  j = nlohmann::json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"distortion", k.distortion}};
}

void from_json(const nlohmann::json& j, Intrinsics& k) {
  j.at("fx").get_to(k.fx);
  j.at("fy").get_to(k.fy);
  j.at("cx").get_to(k.cx);
  j.at("cy").get_to(k.cy);
  k.distortion.fill(0.0);
  if (j.contains("distortion")) {
    const auto& d = j.at("distortion");
    if (!d.is_array() || d.size() > k.distortion.size()) {
      throw FormatError("intrinsics: distortion must be an array of at most 5 numbers");
    }
    for (std::size_t i = 0; i < d.size(); ++i) k.distortion[i] = d[i].get<double>();
  }
  k.validate();
}

void to_json(nlohmann::json& j, const RigidTransform& t) {
  nlohmann::json rot = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(t.rotation(r, c));
  }
  j = nlohmann::json{{"rotation", rot},
                     {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}};
}

void from_json(const nlohmann::json& j, RigidTransform& t) {
  const auto& rot = j.at("rotation");
  const auto& tr = j.at("translation");
  if (!rot.is_array() || rot.size() != 9) throw FormatError("extrinsics: rotation needs 9 values");
  if (!tr.is_array() || tr.size() != 3) throw FormatError("extrinsics: translation needs 3 values");
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) t.rotation(r, c) = rot[r * 3 + c].get<double>();
  }
  for (int i = 0; i < 3; ++i) t.translation(i) = tr[i].get<double>();
  t.validate();
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

namespace {

template <typename T>
T read_typed(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

CameraConfig read_camera(const std::filesystem::path& path) { return read_typed<CameraConfig>(path); }
Intrinsics read_intrinsics(const std::filesystem::path& path) { return read_typed<Intrinsics>(path); }
RigidTransform read_extrinsics(const std::filesystem::path& path) {
  return read_typed<RigidTransform>(path);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace dfd
