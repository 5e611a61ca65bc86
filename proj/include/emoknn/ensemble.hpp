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
#include "emoknn/features.hpp"
#include "emoknn/knn.hpp"
#include "emoknn/preprocess.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emoknn {

/// One ensemble member: what it sees, how it was cleaned and how it votes.
struct MemberSpec
{
  std::string        name;  // e.g. "roBERTa with AI"
  FeatureSpec        features;
  std::optional<int> k;  // rule-of-thumb k when unset
  Aggregation        aggregation = Aggregation::weighted_mean;
  CleaningConfig     cleaning;
};

/// Ordered member list; position is the member's identity in reports.
struct EnsembleConfig
{
  std::string             name;
  std::vector<MemberSpec> members;

  /// At least one member, each member's feature spec and cleaning valid.
  void validate() const;
};

struct EnsemblePrediction
{
  std::string                        instance_id;
  std::vector<double>                member_scores;
  double                             final_score;
  EmotionClass                       rounded;
  std::vector<std::vector<Neighbor>> traces;
};

/// Scores are rounded half up: 1.5 -> 2, 2.4 -> 2.
inline constexpr bool kRoundHalfUp = true;

/// Nearest class, halves up. Throws ValidationError outside [0, 3].
EmotionClass round_label(double score);

/// Equal-weight mean. The sum runs over the scores in ascending order, so the result does not
/// depend on member order.
double mean_vote(std::span<double const> scores);

/// Runs every member on its own feature vector and averages the scores.
EnsemblePrediction predict_ensemble(EnsembleConfig const &config, std::span<WknnModeld const> models,
                                    std::span<Eigen::VectorXd const> features, std::string instance_id = {});

/// Same, from already computed member predictions.
EnsemblePrediction combine_members(std::string instance_id, std::vector<KnnPrediction> member_predictions);

PredictionRecord to_record(EnsemblePrediction const &p);

}  // namespace emoknn
