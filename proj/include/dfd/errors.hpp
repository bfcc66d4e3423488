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

#ifndef DFD_ERRORS_HPP_
#define DFD_ERRORS_HPP_

#include <stdexcept>

namespace dfd {

// Incompatible raster shapes or parameter-vector lengths.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs outside the mathematical domain of an operation (depth below the
// near-field floor, invalid camera, zero-norm latent, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or unreadable files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Optimization aborted (non-finite loss).
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dfd

#endif  // DFD_ERRORS_HPP_
