//------------------------------------------------------------------------------
//
//   Copyright 2026 The emoknn Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace emoknn {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. Work items must write only to their own
/// slot; the first exception (by index) is rethrown after all threads join.
template <typename F>
void parallel_for(std::size_t n, int jobs, F &&fn)
{
  auto const workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      fn(i);
    }
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t>        next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(std::min(workers, n));
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
    {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        {
          try
          {
            fn(i);
          }
          catch (...)
          {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto const &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace emoknn
