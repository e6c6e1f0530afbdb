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

#include "unlearn/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace unlearn {

int WorkerCount() {
  if (const char* env = std::getenv("UNLEARN_DP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

absl::Status ParallelFor(int64_t count,
                         const std::function<absl::Status(int64_t)>& body) {
  if (count <= 0) return absl::OkStatus();
  const int64_t workers = std::min<int64_t>(WorkerCount(), count);
  std::atomic<int64_t> next{0};
  std::mutex mu;
  int64_t first_error_index = count;
  absl::Status first_error;

  auto run = [&] {
    for (;;) {
      const int64_t i = next.fetch_add(1);
      if (i >= count) return;
      absl::Status s = body(i);
      if (!s.ok()) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::move(s);
        }
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (int64_t w = 0; w < workers; ++w) threads.emplace_back(run);
    for (std::thread& t : threads) t.join();
  }
  return first_error;
}

}  // namespace unlearn
