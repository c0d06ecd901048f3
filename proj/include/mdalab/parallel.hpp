// Copyright 2026 The mdalab Authors
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

/// @file parallel.hpp
/// @brief Block-parallel map with results combined in block order.
///
/// Work is cut into fixed-size blocks independent of the thread count, each
/// block produces one partial result, and partials are combined sequentially.
/// Together with CounterRng this makes floating-point output identical for
/// any number of threads.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mdalab {

inline unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Calls `fn(begin, end)` for each block of [0, n) and returns the partials
/// in block order. The first exception thrown by any block is rethrown.
template <class Partial, class Fn>
std::vector<Partial> map_blocks(std::size_t n, std::size_t block, unsigned threads, Fn&& fn) {
  if (block == 0) block = 1;
  const std::size_t blocks = (n + block - 1) / block;
  std::vector<Partial> out(blocks);
  if (blocks == 0) return out;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        out[b] = fn(b * block, std::min(n, (b + 1) * block));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(blocks);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace mdalab
