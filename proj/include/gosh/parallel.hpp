// Copyright 2026 The gosh-cpu Authors
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
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gosh {

// 0 means "all hardware threads".
inline unsigned resolve_workers(unsigned requested) noexcept {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(begin, end, worker) over [0, count) in batches grabbed from a shared
// cursor. With one worker everything runs inline on the calling thread in
// ascending order. The first exception thrown by any worker is rethrown after
// all workers have joined.
template <typename Fn>
void parallel_for_dynamic(std::size_t count, std::size_t batch, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  batch = std::max<std::size_t>(batch, 1);
  workers = resolve_workers(workers);
  const std::size_t max_useful = (count + batch - 1) / batch;
  if (workers > max_useful) workers = static_cast<unsigned>(max_useful);
  if (workers <= 1) {
    for (std::size_t b = 0; b < count; b += batch) fn(b, std::min(count, b + batch), 0u);
    return;
  }

  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&](unsigned worker) {
    try {
      for (;;) {
        const std::size_t b = cursor.fetch_add(batch, std::memory_order_relaxed);
        if (b >= count) break;
        fn(b, std::min(count, b + batch), worker);
      }
    } catch (...) {
      std::lock_guard lk(failure_mu);
      if (!failure) failure = std::current_exception();
      cursor.store(count, std::memory_order_relaxed);
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body, w);
  body(0);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// Static contiguous split into `workers` chunks; fn(begin, end, worker).
template <typename Fn>
void parallel_for_static(std::size_t count, unsigned workers, Fn&& fn) {
  workers = resolve_workers(workers);
  const std::size_t chunk = (count + workers - 1) / std::max<unsigned>(workers, 1);
  parallel_for_dynamic(count, std::max<std::size_t>(chunk, 1), workers, std::forward<Fn>(fn));
}

}  // namespace gosh
