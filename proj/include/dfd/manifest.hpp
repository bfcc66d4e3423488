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

#ifndef DFD_MANIFEST_HPP_
#define DFD_MANIFEST_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace dfd {

inline constexpr const char* kToolVersion = "dfd 0.1.0";

/// SHA-256 of a file's bytes, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

/// Record of one CLI run. Contains no timestamps, so identical runs on
/// identical inputs produce identical manifests.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;

  /// Hashes inputs and outputs and serializes the record.
  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace dfd

#endif  // DFD_MANIFEST_HPP_
