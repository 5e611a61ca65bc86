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
#include <numeric>
#include <string>
#include <vector>

namespace emoknn {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Training matrices store one instance per row.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

template <typename DA, typename DB>
void check_widths(Eigen::MatrixBase<DA> const &a, Eigen::MatrixBase<DB> const &b)
{
  if (a.size() != b.size())
  {
    throw ValidationError("vector width mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
}

template <typename Scalar>
Scalar cosine_from_parts(Scalar dot, Scalar norm_a, Scalar norm_b) noexcept
{
  if (norm_a == Scalar(0) || norm_b == Scalar(0))
  {
    return Scalar(0);
  }
  return std::clamp(dot / (norm_a * norm_b), Scalar(-1), Scalar(1));
}

}  // namespace detail

/// a.b / (|a| |b|), clamped to [-1, 1]. Zero-norm inputs give 0.
template <typename DA, typename DB>
typename DA::Scalar cosine(Eigen::MatrixBase<DA> const &a, Eigen::MatrixBase<DB> const &b)
{
  detail::check_widths(a, b);
  return detail::cosine_from_parts(a.dot(b), a.norm(), b.norm());
}

/// Cosine mapped onto [0, 1]: (1 + cos) / 2.
template <typename DA, typename DB>
typename DA::Scalar cos_similarity(Eigen::MatrixBase<DA> const &a, Eigen::MatrixBase<DB> const &b)
{
  using Scalar = typename DA::Scalar;
  return (Scalar(1) + cosine(a, b)) / Scalar(2);
}

enum class Aggregation
{
  weighted_mean,
  weighted_majority
};

std::string_view to_string(Aggregation a) noexcept;
Aggregation      parse_aggregation(std::string_view name);

struct Neighbor
{
  std::size_t  train_index;
  std::string  train_id;
  double       similarity;
  EmotionClass label;

  friend bool operator==(Neighbor const &, Neighbor const &) = default;
};

struct KnnPrediction
{
  double                score;
  std::vector<Neighbor> trace;
};

/// Odd k nearest sqrt(n)/2; halfway cases round up. rule_of_thumb_k(2000) == 23.
int rule_of_thumb_k(std::size_t n);

/// Similarity-weighted kNN over a frozen training matrix.
///
/// Neighbors are ranked by cos_similarity, descending, ties broken by training order. All query
/// methods are const and allocation-local, so one model can serve concurrent queries.
template <typename Scalar>
class WknnModel
{
public:
  WknnModel(RowMatrix<Scalar> matrix, std::vector<EmotionClass> labels, std::vector<std::string> ids, int k,
            Aggregation aggregation = Aggregation::weighted_mean)
    : matrix_(std::move(matrix))
    , labels_(std::move(labels))
    , ids_(std::move(ids))
    , k_(k)
    , aggregation_(aggregation)
  {
    auto const n = static_cast<std::size_t>(matrix_.rows());
    if (labels_.size() != n || ids_.size() != n)
    {
      throw ValidationError("training matrix has " + std::to_string(n) + " rows but " +
                            std::to_string(labels_.size()) + " labels and " + std::to_string(ids_.size()) +
                            " ids");
    }
    if (k_ < 1 || k_ % 2 == 0)
    {
      throw ValidationError("k must be an odd integer >= 1, got " + std::to_string(k_));
    }
    if (n < static_cast<std::size_t>(k_))
    {
      throw ValidationError("k = " + std::to_string(k_) + " exceeds the " + std::to_string(n) +
                            " training instances");
    }
    norms_ = matrix_.rowwise().norm();
  }

  int k() const noexcept
  {
    return k_;
  }
  Aggregation aggregation() const noexcept
  {
    return aggregation_;
  }
  Eigen::Index width() const noexcept
  {
    return matrix_.cols();
  }
  std::size_t size() const noexcept
  {
    return labels_.size();
  }
  RowMatrix<Scalar> const &matrix() const noexcept
  {
    return matrix_;
  }
  std::vector<EmotionClass> const &labels() const noexcept
  {
    return labels_;
  }
  std::vector<std::string> const &ids() const noexcept
  {
    return ids_;
  }

  /// cos_similarity of the query against every training row, in training order.
  template <typename Derived>
  Vector<Scalar> similarities(Eigen::MatrixBase<Derived> const &query) const
  {
    if (query.size() != matrix_.cols())
    {
      throw ValidationError("query width " + std::to_string(query.size()) + " does not match model width " +
                            std::to_string(matrix_.cols()));
    }
    Vector<Scalar> const q      = query;
    Scalar const         q_norm = q.norm();
    Vector<Scalar>       sims(matrix_.rows());
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i)
    {
      Scalar const dot = matrix_.row(i).dot(q.transpose());
      sims[i]          = (Scalar(1) + detail::cosine_from_parts(dot, norms_[i], q_norm)) / Scalar(2);
    }
    return sims;
  }

  /// The k most similar training instances, most similar first.
  template <typename Derived>
  std::vector<Neighbor> neighbors(Eigen::MatrixBase<Derived> const &query) const
  {
    auto const sims = similarities(query);

    std::vector<std::size_t> order(static_cast<std::size_t>(sims.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto const kk = static_cast<std::ptrdiff_t>(k_);
    std::partial_sort(order.begin(), order.begin() + kk, order.end(), [&sims](std::size_t a, std::size_t b) {
      auto const sa = sims[static_cast<Eigen::Index>(a)];
      auto const sb = sims[static_cast<Eigen::Index>(b)];
      return sa > sb || (sa == sb && a < b);
    });

    std::vector<Neighbor> out;
    out.reserve(static_cast<std::size_t>(k_));
    for (std::ptrdiff_t j = 0; j < kk; ++j)
    {
      auto const i = order[static_cast<std::size_t>(j)];
      out.push_back({i, ids_[i], static_cast<double>(sims[static_cast<Eigen::Index>(i)]), labels_[i]});
    }
    return out;
  }

  /// Score in [0, 3] plus the neighbor trace it was computed from.
  template <typename Derived>
  KnnPrediction predict(Eigen::MatrixBase<Derived> const &query) const
  {
    auto trace = neighbors(query);
    return {aggregate(trace, aggregation_), std::move(trace)};
  }

  /// weighted_mean: sum(w l) / sum(w), plain mean when all weights are 0.
  /// weighted_majority: class with the largest weight total, lowest class on ties.
  static double aggregate(std::vector<Neighbor> const &trace, Aggregation mode)
  {
    if (trace.empty())
    {
      throw DegenerateError("cannot aggregate an empty neighbor list");
    }
    if (mode == Aggregation::weighted_mean)
    {
      double num = 0.0;
      double den = 0.0;
      for (auto const &n : trace)
      {
        num += n.similarity * n.label.value();
        den += n.similarity;
      }
      if (den == 0.0)
      {
        double sum = 0.0;
        for (auto const &n : trace)
        {
          sum += n.label.value();
        }
        return sum / static_cast<double>(trace.size());
      }
      return std::clamp(num / den, 0.0, double(EmotionClass::kCount - 1));
    }

    std::array<double, EmotionClass::kCount> votes{};
    for (auto const &n : trace)
    {
      votes[static_cast<std::size_t>(n.label.value())] += n.similarity;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
    {
      if (votes[c] > votes[best])
      {
        best = c;
      }
    }
    return static_cast<double>(best);
  }

private:
  RowMatrix<Scalar>         matrix_;
  Vector<Scalar>            norms_;
  std::vector<EmotionClass> labels_;
  std::vector<std::string>  ids_;
  int                       k_;
  Aggregation               aggregation_;
};

using WknnModeld = WknnModel<double>;

}  // namespace emoknn
