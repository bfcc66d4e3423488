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

#ifndef DFD_CONFIG_IO_HPP_
#define DFD_CONFIG_IO_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"

#include "dfd/eval.hpp"
#include "dfd/optics.hpp"

namespace dfd {

// CameraConfig <-> {"focal_length_m", "focus_distance_m", "f_stop",
//                   "pixel_pitch_m", "exposure_s", "max_window_px"}
void to_json(nlohmann::json& j, const CameraConfig& cam);
void from_json(const nlohmann::json& j, CameraConfig& cam);

// Intrinsics <-> {"fx", "fy", "cx", "cy", "distortion": [k1, k2, p1, p2, k3]}
// ("distortion" optional, shorter arrays are zero-padded)
void to_json(nlohmann::json& j, const Intrinsics& k);
void from_json(const nlohmann::json& j, Intrinsics& k);

// RigidTransform <-> {"rotation": [9 values, row-major], "translation": [x, y, z]}
void to_json(nlohmann::json& j, const RigidTransform& t);
void from_json(const nlohmann::json& j, RigidTransform& t);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

CameraConfig read_camera(const std::filesystem::path& path);
Intrinsics read_intrinsics(const std::filesystem::path& path);
RigidTransform read_extrinsics(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace dfd

#endif  // DFD_CONFIG_IO_HPP_
