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
#include "emoknn/ensemble.hpp"
#include "emoknn/eval.hpp"
#include "emoknn/explain.hpp"
#include "emoknn/features.hpp"
#include "emoknn/lexicon.hpp"
#include "emoknn/preprocess.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace emoknn {

namespace fs = std::filesystem;

struct EmotionData
{
  fs::path                train;
  std::optional<fs::path> dev;
  std::optional<fs::path> test;
};

/// One embedding interchange source. Files sharing (model, cleaning) are merged into one store.
struct EmbeddingSource
{
  std::string                   model;
  std::optional<CleaningConfig> cleaning;  // unset: serves every cleaning variant
  std::vector<fs::path>         files;
};

struct LexiconSource
{
  LexiconName             name;
  fs::path                file;
  std::optional<fs::path> descriptor;  // default: <file>.json
};

/// Single-model grid plus named ensembles evaluated alongside it.
struct SweepGrid
{
  std::vector<FeatureSpec>        features;
  std::vector<CleaningConfig>     cleaning = {CleaningConfig::raw()};
  std::vector<std::optional<int>> k        = {std::nullopt};  // nullopt: rule of thumb
  Aggregation                     aggregation = Aggregation::weighted_mean;
  std::vector<std::string>        ensembles;
};

/// An ensemble definition, shared by all emotions or given per emotion.
struct NamedEnsemble
{
  std::optional<EnsembleConfig>     all;
  std::map<Emotion, EnsembleConfig> per_emotion;

  EnsembleConfig const &for_emotion(Emotion e) const;
};

/// The experiment protocol as read from a JSON config (schema in docs/config.md).
struct ExperimentConfig
{
  fs::path                             base_dir;
  std::vector<Emotion>                 emotions;
  std::map<Emotion, EmotionData>       data;
  std::optional<fs::path>              emoticons;
  std::optional<fs::path>              emojis;
  std::optional<fs::path>              stopwords;
  std::vector<EmbeddingSource>         embeddings;
  std::vector<LexiconSource>           lexicons;
  SweepGrid                            sweep;
  std::map<std::string, NamedEnsemble> ensembles;
  std::map<Emotion, std::string>       predict_ensemble;
  std::vector<std::string>             explain_ids;
  std::uint64_t                        seed   = FoldAssignment::kDefaultSeed;
  int                                  folds  = 5;
  fs::path                             output = "out";

  /// Relative paths resolve against `base_dir`.
  static ExperimentConfig parse(std::string_view json, fs::path const &base_dir);
  static ExperimentConfig load(fs::path const &path);
};

/// The best ensemble of the reference protocol for one emotion: five embedding members, the best
/// lexicon on its own, and roBERTa appended with that lexicon. Embedding model names are
/// "roberta", "deepmoji", "use", "sbert" and "word2vec".
EnsembleConfig preset_best_ensemble(Emotion emotion);

/// Datasets, tables, lexicons and embedding stores for a run. Immutable after load.
class Workspace
{
public:
  /// Loads what `emotions` need. `with_test` also loads the test splits.
  static Workspace load(ExperimentConfig const &config, std::vector<Emotion> const &emotions, bool with_test);

  /// train followed by dev.
  Dataset const &training(Emotion e) const;
  Dataset const *test(Emotion e) const;

  CleaningResources const &resources() const noexcept
  {
    return *resources_;
  }
  LexiconSet const &lexicons() const noexcept
  {
    return *lexicons_;
  }

  /// Store for `model` preprocessed with `cleaning`; nullptr if none is configured.
  EmbeddingStore const *store(std::string const &model, CleaningConfig const &cleaning) const;

  /// Builder-style setters for in-memory workspaces.
  Workspace() = default;
  void add_training(Dataset ds);
  void add_test(Dataset ds);
  void set_resources(CleaningResources res);
  void set_lexicons(LexiconSet lex);
  void add_store(std::optional<CleaningConfig> cleaning, EmbeddingStore store);

private:
  std::map<Emotion, Dataset>                                    training_;
  std::map<Emotion, Dataset>                                    test_;
  std::shared_ptr<CleaningResources>                            resources_ = std::make_shared<CleaningResources>();
  std::shared_ptr<LexiconSet>                                   lexicons_  = std::make_shared<LexiconSet>();
  std::vector<std::pair<std::optional<CleaningConfig>, EmbeddingStore>> stores_;
};

/// Raw feature blocks of `dataset` as seen by `member` (cleaning, tokens, store lookup).
FeatureBlocks member_blocks(MemberSpec const &member, Workspace const &ws, Dataset const &dataset,
                            std::vector<std::string> *warnings = nullptr);

/// k for a member trained on `n` instances (explicit k or the rule of thumb).
int resolve_k(MemberSpec const &member, std::size_t n);

/// Member models fitted on training rows, ready to score new instances.
class TrainedEnsemble
{
public:
  /// `train_blocks[m]` holds member m's raw rows for the training instances. `k_reference` is
  /// the dataset size used for rule-of-thumb k.
  TrainedEnsemble(EnsembleConfig config, std::vector<FeatureBlocks> const &train_blocks,
                  std::vector<EmotionClass> labels, std::vector<std::string> ids, std::size_t k_reference);

  EnsembleConfig const &config() const noexcept
  {
    return config_;
  }
  std::vector<WknnModeld> const &models() const noexcept
  {
    return models_;
  }
  std::vector<std::string> member_names() const;

  /// Final per-member feature matrices for query blocks.
  std::vector<Eigen::MatrixXd> featurize(std::vector<FeatureBlocks> const &query_blocks) const;

  EnsemblePrediction predict(std::vector<Eigen::MatrixXd> const &features, Eigen::Index row, std::string id) const;

private:
  EnsembleConfig                 config_;
  std::vector<FeatureNormalizer> normalizers_;
  std::vector<WknnModeld>        models_;
};

/// Cross-validates an ensemble on a dataset given precomputed member blocks over all its rows.
EvalReport cross_validate_ensemble(EnsembleConfig const &config, std::vector<FeatureBlocks const *> const &blocks,
                                   Dataset const &dataset, FoldAssignment const &folds, std::string setup);

struct RunOptions
{
  std::vector<Emotion>                   emotions;
  fs::path                               out_dir;
  std::optional<std::uint64_t>           seed;
  int                                    jobs = 1;
  std::optional<std::vector<std::string>> ids;
};

enum class RowKind
{
  grid,
  best,
  average
};

struct SweepRow
{
  RowKind     kind = RowKind::grid;
  Emotion     emotion{};
  std::string setup;
  std::string features;
  std::string cleaning;
  int         k = 0;  // 0 for ensembles
  std::string aggregation;
  EvalReport  report;
};

struct TTestRow
{
  Emotion     emotion{};
  std::string features;
  int         k = 0;
  std::string cleaning_a;
  std::string cleaning_b;
  double      mean_a = 0.0;
  double      mean_b = 0.0;
  std::optional<TTestResult> result;
};

struct SweepResult
{
  std::vector<SweepRow> rows;  // grid rows, then best rows, then the average row
  std::vector<TTestRow> ttests;
  std::optional<double> average_best;

  std::string format_table(int n_folds) const;
  std::string format_ttests() const;
  /// Long form: one row per (setup, fold) followed by a "mean" summary row per setup.
  std::string format_folds() const;
};

/// Index of the best grid row for `emotion`: max mean PCC, then smaller k, then less cleaning,
/// then grid order. nullopt when no row succeeded.
std::optional<std::size_t> select_best(std::vector<SweepRow> const &rows, Emotion emotion);

SweepResult run_sweep(ExperimentConfig const &config, Workspace const &ws, RunOptions const &options);

struct PredictResult
{
  std::map<Emotion, std::vector<EnsemblePrediction>> predictions;
  std::vector<ExplanationReport>                     explanations;
  std::vector<std::string>                           warnings;
};

/// Trains each emotion's ensemble on train+dev, scores the test split, writes submissions
/// (unless `write_submissions` is false) and explanation reports for the requested ids.
PredictResult run_predict(ExperimentConfig const &config, Workspace const &ws, RunOptions const &options,
                          bool write_submissions = true);

struct ValidationReport
{
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  bool ok() const noexcept
  {
    return failures.empty();
  }
};

/// Checks paths, dataset/store id coverage, lexicon schemas and grid sanity. Never throws.
ValidationReport validate_artifacts(ExperimentConfig const &config, std::vector<Emotion> const &emotions);

/// Shortest round-trip decimal form used in every emitted table.
std::string format_real(double v);

}  // namespace emoknn
