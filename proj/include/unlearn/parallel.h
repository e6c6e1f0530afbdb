// Copyright 2026 The Unlearn-DP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNLEARN_PARALLEL_H_
#define UNLEARN_PARALLEL_H_

#include <cstdint>
#include <functional>

#include "absl/status/status.h"

namespace unlearn {

// Worker count: UNLEARN_DP_THREADS when set to a positive integer, else the
// hardware concurrency (at least 1).
int WorkerCount();

// Runs body(i) for i in [0, count) on up to WorkerCount() threads. Each index
// runs exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling. Returns the error of the lowest
// failing index, if any.
absl::Status ParallelFor(int64_t count,
                         const std::function<absl::Status(int64_t)>& body);

}  // namespace unlearn

#endif  // UNLEARN_PARALLEL_H_
