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

#include "emoknn/ensemble.hpp"
#include "emoknn/knn.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emoknn {

/// Neighbor class counts of one member's prediction.
struct ClassHistogram
{
  std::string        model;
  int                k = 0;
  std::array<int, 4> counts{};

  friend bool operator==(ClassHistogram const &, ClassHistogram const &) = default;
};

ClassHistogram class_histogram(std::span<Neighbor const> trace, std::string model = {});

struct MemberTrace
{
  std::string           member;
  std::vector<Neighbor> neighbors;
};

struct IntersectionEntry
{
  std::string              train_id;
  int                      count = 0;
  std::vector<std::string> members;  // in member order
  int                      label = 0;
  std::string              text;

  friend bool operator==(IntersectionEntry const &, IntersectionEntry const &) = default;
};

/// Training instances selected by the ensemble's members, most shared first (ties by id).
struct IntersectionReport
{
  std::vector<IntersectionEntry> entries;

  /// Entries selected by at least `min_count` members.
  std::vector<IntersectionEntry> shared(int min_count = 2) const;

  friend bool operator==(IntersectionReport const &, IntersectionReport const &) = default;
};

/// Training text by id, used to annotate intersection entries. May return empty.
using TextLookup = std::function<std::string(std::string_view train_id)>;

IntersectionReport neighbor_intersection(std::span<MemberTrace const> traces, TextLookup const &text_of = {});

struct MemberExplanation
{
  std::string    name;
  int            k = 0;
  double         score = 0.0;
  ClassHistogram histogram;

  friend bool operator==(MemberExplanation const &, MemberExplanation const &) = default;
};

/// Everything needed to explain one ensemble prediction.
struct ExplanationReport
{
  std::string                    instance_id;
  std::string                    text;
  std::optional<int>             gold;
  double                         final_score = 0.0;
  int                            rounded     = 0;
  std::vector<MemberExplanation> members;
  IntersectionReport             intersection;

  /// Machine-readable form (JSON).
  std::string to_json() const;
  static ExplanationReport from_json(std::string_view json);

  /// Plain-text rendering for people.
  std::string to_text() const;

  friend bool operator==(ExplanationReport const &, ExplanationReport const &) = default;
};

/// Builds the report; histograms and member names follow the prediction's member order.
ExplanationReport render_explanation(EnsemblePrediction const &prediction, std::span<ClassHistogram const> histograms,
                                     IntersectionReport intersection, std::string text = {},
                                     std::optional<int> gold = std::nullopt);

/// Convenience: histograms and intersection straight from a prediction's traces.
ExplanationReport explain_prediction(EnsemblePrediction const &prediction, std::span<std::string const> member_names,
                                     TextLookup const &text_of = {}, std::string text = {},
                                     std::optional<int> gold = std::nullopt);

}  // namespace emoknn
