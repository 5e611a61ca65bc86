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
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace emoknn::oracle {

/// Textbook cosine similarity on plain vectors, mapped onto [0, 1].
inline double cos_similarity(std::vector<double> const &a, std::vector<double> const &b)
{
  double dot = 0.0;
  double na  = 0.0;
  double nb  = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
  {
    return 0.5;
  }
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  c        = std::max(-1.0, std::min(1.0, c));
  return (1.0 + c) / 2.0;
}

/// Indices of all training points by descending similarity, ties by index; full sort.
inline std::vector<std::pair<std::size_t, double>> ranked(std::vector<std::vector<double>> const &train,
                                                          std::vector<double> const              &query)
{
  std::vector<std::pair<std::size_t, double>> all;
  for (std::size_t i = 0; i < train.size(); ++i)
  {
    all.emplace_back(i, cos_similarity(train[i], query));
  }
  std::sort(all.begin(), all.end(), [](auto const &x, auto const &y) {
    if (x.second != y.second)
    {
      return x.second > y.second;
    }
    return x.first < y.first;
  });
  return all;
}

/// sum(w l) / sum(w) over the first k ranked points.
inline double weighted_mean(std::vector<std::pair<std::size_t, double>> const &ranked_points,
                            std::vector<int> const &labels, int k)
{
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < k; ++j)
  {
    auto const [i, w] = ranked_points[static_cast<std::size_t>(j)];
    num += w * labels[i];
    den += w;
  }
  return num / den;
}

/// Two-pass Pearson correlation.
inline double pearson(std::vector<double> const &x, std::vector<double> const &y)
{
  double const n  = static_cast<double>(x.size());
  double       mx = 0.0;
  double       my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Student-t density.
inline double t_pdf(double t, double df)
{
  return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI) *
         std::pow(1 + t * t / df, -(df + 1) / 2);
}

/// Two-sided tail probability P(|T| > |t|) by composite Simpson integration of the density over
/// [0, |t|].
inline double t_two_sided_p(double t, double df, int intervals = 200000)
{
  double const b = std::abs(t);
  double const h = b / intervals;
  double       s = t_pdf(0, df) + t_pdf(b, df);
  for (int i = 1; i < intervals; ++i)
  {
    s += (i % 2 ? 4.0 : 2.0) * t_pdf(i * h, df);
  }
  double const half_mass = s * h / 3.0;
  return 1.0 - 2.0 * half_mass;
}

}  // namespace emoknn::oracle
