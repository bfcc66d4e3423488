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

#ifndef DFD_PARALLEL_HPP_
#define DFD_PARALLEL_HPP_

#include <functional>

namespace dfd {

/// Number of worker threads used by the internally parallel kernels.
/// Defaults to the DFD_THREADS environment variable, or the hardware
/// concurrency when unset.
int thread_count();

/// Overrides the worker count. Values < 1 restore the default.
void set_thread_count(int n);

/// Splits [begin, end) into contiguous chunks and runs body(chunk_begin,
/// chunk_end) on each. Every index is visited by exactly one call, so
/// kernels that write disjoint outputs per index stay bit-deterministic
/// regardless of the worker count.
void parallel_for(int begin, int end, const std::function<void(int, int)>& body);

}  // namespace dfd

#endif  // DFD_PARALLEL_HPP_
