// Copyright 2026 The coseg Authors.
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace coseg {

// Worker cap for data-parallel loops. Every parallel loop in the library
// writes disjoint outputs per index, so results do not depend on `threads`.
struct ExecPolicy {
  unsigned threads = 1;
};

// Runs fn(begin, end) over static contiguous chunks of [0, n). The first
// exception thrown by any chunk is rethrown on the calling thread.
inline void parallel_for(std::size_t n, ExecPolicy policy,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, policy.threads), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 2) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace coseg
