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

#include "emoknn/data_model.hpp"
#include "emoknn/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emoknn {

/// Pearson correlation, two-pass. Throws DegenerateError when either input is constant.
template <typename DX, typename DY>
typename DX::Scalar pcc(Eigen::MatrixBase<DX> const &x, Eigen::MatrixBase<DY> const &y)
{
  using Scalar = typename DX::Scalar;
  if (x.size() != y.size())
  {
    throw ValidationError("pcc inputs differ in length: " + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()));
  }
  if (x.size() < 2)
  {
    throw DegenerateError("pcc needs at least two points");
  }
  auto const xc  = (x.array() - x.mean()).eval();
  auto const yc  = (y.array() - y.mean()).eval();
  Scalar const sxx = (xc * xc).sum();
  Scalar const syy = (yc * yc).sum();
  if (sxx == Scalar(0) || syy == Scalar(0))
  {
    throw DegenerateError("pcc is undefined for a constant input");
  }
  Scalar const r = (xc * yc).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, Scalar(-1), Scalar(1));
}

double pcc(std::span<double const> x, std::span<double const> y);

/// Stratified k-fold partition of instance indices.
struct FoldAssignment
{
  int                 n_folds = 5;
  std::uint64_t       seed    = 0;
  std::vector<int>    fold_of;

  /// Classes are shuffled independently (mt19937_64 seeded with `seed`) and dealt round-robin
  /// in class order, so fold sizes and per-class fold counts both differ by at most one.
  static FoldAssignment stratified(std::span<int const> labels, int n_folds = 5, std::uint64_t seed = kDefaultSeed);

  std::vector<std::size_t> train_indices(int fold) const;
  std::vector<std::size_t> test_indices(int fold) const;

  static constexpr std::uint64_t kDefaultSeed = 20180601;
};

struct FoldResult
{
  std::optional<double> pcc;
  std::string           error;  // set when pcc is empty
};

struct EvalReport
{
  std::string             setup;
  std::vector<FoldResult> folds;
  std::optional<double>   mean_pcc;  // only when every fold succeeded

  bool ok() const noexcept
  {
    return mean_pcc.has_value();
  }
  std::vector<double> per_fold_pcc() const;
};

/// Float predictions for `test` after training on `train` (indices into the dataset).
using FoldPredictor =
    std::function<std::vector<double>(std::span<std::size_t const> train, std::span<std::size_t const> test)>;

/// Runs the predictor on every fold and scores unrounded predictions against `gold`.
/// Exceptions inside a fold mark that fold failed; the others still run.
EvalReport cross_validate(std::span<double const> gold, FoldAssignment const &folds, FoldPredictor const &predict,
                          std::string setup = {});

EvalReport cross_validate(Dataset const &dataset, FoldAssignment const &folds, FoldPredictor const &predict,
                          std::string setup = {});

/// Mean over the four emotions; all four must be present.
double average_emotions(std::map<Emotion, double> const &scores);

std::array<std::size_t, 4> class_sizes(Dataset const &dataset);

/// Largest class size over smallest. Every class must be non-empty.
double imbalance_ratio(std::array<std::size_t, 4> const &sizes);
double imbalance_ratio(Dataset const &dataset);

struct TTestResult
{
  double t;
  double p;
  double df;
};

/// Welch's unequal-variance t-test, two-sided p-value from the Student-t distribution.
TTestResult ttest_two_sided(std::span<double const> a, std::span<double const> b);

}  // namespace emoknn
