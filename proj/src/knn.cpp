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
#include "emoknn/knn.hpp"

#include <cmath>

namespace emoknn {

std::string_view to_string(Aggregation a) noexcept
{
  return a == Aggregation::weighted_mean ? "weighted_mean" : "weighted_majority";
}

Aggregation parse_aggregation(std::string_view name)
{
  if (name == "weighted_mean")
  {
    return Aggregation::weighted_mean;
  }
  if (name == "weighted_majority")
  {
    return Aggregation::weighted_majority;
  }
  throw ValidationError("unknown aggregation '" + std::string(name) + "'");
}

int rule_of_thumb_k(std::size_t n)
{
  if (n == 0)
  {
    throw ValidationError("rule-of-thumb k needs at least one sample");
  }
  double const target = std::sqrt(static_cast<double>(n)) / 2.0;
  // odd numbers are 2m + 1; pick m nearest (target - 1) / 2, halves up
  auto const m = static_cast<int>(std::floor((target - 1.0) / 2.0 + 0.5));
  return 2 * std::max(m, 0) + 1;
}

}  // namespace emoknn
