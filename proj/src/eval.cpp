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
#include "emoknn/eval.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <limits>
#include <random>

namespace emoknn {

double pcc(std::span<double const> x, std::span<double const> y)
{
  using Map = Eigen::Map<Eigen::VectorXd const>;
  return pcc(Map(x.data(), static_cast<Eigen::Index>(x.size())), Map(y.data(), static_cast<Eigen::Index>(y.size())));
}

namespace {

// std::uniform_int_distribution is implementation-defined; fold assignment must not be.
std::uint64_t uniform_below(std::uint64_t bound, std::mt19937_64 &rng)
{
  auto const limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  while (true)
  {
    auto const x = rng();
    if (x < limit)
    {
      return x % bound;
    }
  }
}

}  // namespace

FoldAssignment FoldAssignment::stratified(std::span<int const> labels, int n_folds, std::uint64_t seed)
{
  if (n_folds < 2)
  {
    throw ValidationError("need at least 2 folds");
  }
  if (labels.size() < static_cast<std::size_t>(n_folds))
  {
    throw ValidationError("cannot split " + std::to_string(labels.size()) + " instances into " +
                          std::to_string(n_folds) + " folds");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
  {
    by_class[labels[i]].push_back(i);
  }

  std::mt19937_64 rng(seed);
  FoldAssignment  out{n_folds, seed, std::vector<int>(labels.size(), -1)};
  std::size_t     position = 0;
  for (auto &[label, idx] : by_class)
  {
    for (std::size_t i = idx.size(); i > 1; --i)
    {
      std::swap(idx[i - 1], idx[uniform_below(i, rng)]);
    }
    for (auto i : idx)
    {
      out.fold_of[i] = static_cast<int>(position % static_cast<std::size_t>(n_folds));
      ++position;
    }
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
  {
    if (fold_of[i] != fold)
    {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
  {
    if (fold_of[i] == fold)
    {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<double> EvalReport::per_fold_pcc() const
{
  std::vector<double> out;
  for (auto const &f : folds)
  {
    if (f.pcc)
    {
      out.push_back(*f.pcc);
    }
  }
  return out;
}

EvalReport cross_validate(std::span<double const> gold, FoldAssignment const &folds, FoldPredictor const &predict,
                          std::string setup)
{
  if (folds.fold_of.size() != gold.size())
  {
    throw ValidationError("fold assignment covers " + std::to_string(folds.fold_of.size()) + " instances, dataset has " +
                          std::to_string(gold.size()));
  }
  EvalReport report{std::move(setup), {}, std::nullopt};
  double     sum = 0.0;
  for (int f = 0; f < folds.n_folds; ++f)
  {
    auto const train = folds.train_indices(f);
    auto const test  = folds.test_indices(f);
    try
    {
      auto const predicted = predict(train, test);
      if (predicted.size() != test.size())
      {
        throw ValidationError("predictor returned " + std::to_string(predicted.size()) + " scores for " +
                              std::to_string(test.size()) + " test instances");
      }
      std::vector<double> expected;
      expected.reserve(test.size());
      for (auto i : test)
      {
        expected.push_back(gold[i]);
      }
      double const r = pcc(std::span<double const>(predicted), std::span<double const>(expected));
      report.folds.push_back({r, {}});
      sum += r;
    }
    catch (std::exception const &e)
    {
      report.folds.push_back({std::nullopt, e.what()});
    }
  }
  bool const all_ok = std::all_of(report.folds.begin(), report.folds.end(), [](auto const &f) { return f.pcc.has_value(); });
  if (all_ok)
  {
    report.mean_pcc = sum / static_cast<double>(report.folds.size());
  }
  return report;
}

EvalReport cross_validate(Dataset const &dataset, FoldAssignment const &folds, FoldPredictor const &predict,
                          std::string setup)
{
  auto const gold = dataset.gold();
  return cross_validate(std::span<double const>(gold), folds, predict, std::move(setup));
}

double average_emotions(std::map<Emotion, double> const &scores)
{
  double sum = 0.0;
  for (auto e : kAllEmotions)
  {
    auto it = scores.find(e);
    if (it == scores.end())
    {
      throw ValidationError("missing score for " + std::string(to_string(e)));
    }
    sum += it->second;
  }
  return sum / 4.0;
}

std::array<std::size_t, 4> class_sizes(Dataset const &dataset)
{
  std::array<std::size_t, 4> sizes{};
  for (auto const &inst : dataset.instances())
  {
    if (!inst.label)
    {
      throw ValidationError("instance " + inst.id + " has no label");
    }
    ++sizes[static_cast<std::size_t>(inst.label->value())];
  }
  return sizes;
}

double imbalance_ratio(std::array<std::size_t, 4> const &sizes)
{
  auto const [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  if (*lo == 0)
  {
    throw ValidationError("imbalance ratio needs every class to be non-empty");
  }
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

double imbalance_ratio(Dataset const &dataset)
{
  return imbalance_ratio(class_sizes(dataset));
}

TTestResult ttest_two_sided(std::span<double const> a, std::span<double const> b)
{
  if (a.size() < 2 || b.size() < 2)
  {
    throw ValidationError("t-test needs at least two values per sample");
  }
  auto moments = [](std::span<double const> x) {
    double mean = 0.0;
    for (double v : x)
    {
      mean += v;
    }
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x)
    {
      ss += (v - mean) * (v - mean);
    }
    return std::pair{mean, ss / static_cast<double>(x.size() - 1)};
  };
  auto const [ma, va] = moments(a);
  auto const [mb, vb] = moments(b);
  double const na = static_cast<double>(a.size());
  double const nb = static_cast<double>(b.size());
  double const sa = va / na;
  double const sb = vb / nb;
  double const se2 = sa + sb;
  if (se2 == 0.0)
  {
    throw DegenerateError("t-test is undefined when both samples have zero variance");
  }
  double const t  = (ma - mb) / std::sqrt(se2);
  double const df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));

  boost::math::students_t dist(df);
  double const            p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
  return {t, p, df};
}

}  // namespace emoknn
