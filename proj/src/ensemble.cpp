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
#include "emoknn/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace emoknn {

void EnsembleConfig::validate() const
{
  if (members.empty())
  {
    throw ValidationError("ensemble '" + name + "' has no members");
  }
  for (auto const &m : members)
  {
    m.features.validate();
    m.cleaning.validate();
    if (m.k && (*m.k < 1 || *m.k % 2 == 0))
    {
      throw ValidationError("member '" + m.name + "' has invalid k " + std::to_string(*m.k));
    }
  }
}

EmotionClass round_label(double score)
{
  if (!(score >= 0.0 && score <= 3.0))
  {
    throw ValidationError("score " + std::to_string(score) + " outside [0, 3]");
  }
  return EmotionClass(static_cast<int>(std::floor(score + 0.5)));
}

double mean_vote(std::span<double const> scores)
{
  if (scores.empty())
  {
    throw DegenerateError("mean of zero member scores");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double s : sorted)
  {
    sum += s;
  }
  return sum / static_cast<double>(sorted.size());
}

EnsemblePrediction combine_members(std::string instance_id, std::vector<KnnPrediction> member_predictions)
{
  std::vector<double>                scores;
  std::vector<std::vector<Neighbor>> traces;
  scores.reserve(member_predictions.size());
  traces.reserve(member_predictions.size());
  for (auto &p : member_predictions)
  {
    scores.push_back(p.score);
    traces.push_back(std::move(p.trace));
  }
  double const final_score = mean_vote(scores);
  return {std::move(instance_id), std::move(scores), final_score, round_label(final_score), std::move(traces)};
}

EnsemblePrediction predict_ensemble(EnsembleConfig const &config, std::span<WknnModeld const> models,
                                    std::span<Eigen::VectorXd const> features, std::string instance_id)
{
  if (models.size() != config.members.size() || features.size() != config.members.size())
  {
    throw ValidationError("ensemble '" + config.name + "' has " + std::to_string(config.members.size()) +
                          " members but got " + std::to_string(models.size()) + " models and " +
                          std::to_string(features.size()) + " feature vectors");
  }
  std::vector<KnnPrediction> preds;
  preds.reserve(models.size());
  for (std::size_t m = 0; m < models.size(); ++m)
  {
    preds.push_back(models[m].predict(features[m]));
  }
  return combine_members(std::move(instance_id), std::move(preds));
}

PredictionRecord to_record(EnsemblePrediction const &p)
{
  return {p.instance_id, p.final_score, p.rounded};
}

}  // namespace emoknn
