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
#include "doctest.h"

#include "emoknn/cli.hpp"
#include "emoknn/error.hpp"
#include "emoknn/experiment.hpp"
#include "support.hpp"

#include <sstream>

using namespace emoknn;
using namespace emoknn::testing;

namespace {

std::vector<std::vector<std::string>> read_tsv(fs::path const &path)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream                    in(read_file(path));
  std::string                           line;
  while (std::getline(in, line))
  {
    std::vector<std::string> fields;
    std::string              field;
    std::istringstream       ls(line);
    while (std::getline(ls, field, '\t'))
    {
      fields.push_back(field);
    }
    rows.push_back(fields);
  }
  return rows;
}

int cli(std::vector<std::string> args, std::string *out = nullptr)
{
  args.insert(args.begin(), "emoknn");
  std::vector<char const *> argv;
  for (auto const &a : args)
  {
    argv.push_back(a.c_str());
  }
  std::ostringstream o;
  std::ostringstream e;
  int const          code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out)
  {
    *out = o.str() + e.str();
  }
  return code;
}

RunOptions anger_options(fs::path out)
{
  RunOptions opts;
  opts.emotions = {Emotion::anger};
  opts.out_dir  = std::move(out);
  return opts;
}

}  // namespace

TEST_CASE("config parsing")
{
  TempDir    dir;
  auto const path   = write_synthetic(dir.path());
  auto const config = ExperimentConfig::load(path);
  CHECK(config.emotions == std::vector<Emotion>{Emotion::anger});
  CHECK(config.folds == 5);
  CHECK(config.data.at(Emotion::anger).train == dir / "anger-train.txt");
  REQUIRE(config.sweep.k.size() == 2);
  CHECK_FALSE(config.sweep.k[0]);
  CHECK(*config.sweep.k[1] == 5);
  auto const &pair = config.ensembles.at("pair").for_emotion(Emotion::joy);
  REQUIRE(pair.members.size() == 2);
  CHECK(pair.members[1].aggregation == Aggregation::weighted_majority);
  CHECK(config.predict_ensemble.at(Emotion::fear) == "pair");

  CHECK_THROWS_AS(ExperimentConfig::parse("{", dir.path()), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse(R"({"data": {"rage": {"train": "x"}}})", dir.path()), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse(R"({"data": {}, "sweep": {"k": ["many"]}})", dir.path()), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse(R"({"data": {}, "ensembles": {"x": {"preset": "worst"}}})", dir.path()),
                  ValidationError);
}

TEST_CASE("preset best ensemble")
{
  for (auto e : kAllEmotions)
  {
    auto const cfg = preset_best_ensemble(e);
    CHECK(cfg.members.size() == 7);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.members[6].features.mode == FeatureMode::appended);
    CHECK(cfg.members[6].cleaning == cfg.members[0].cleaning);
  }
  auto const anger = preset_best_ensemble(Emotion::anger);
  std::vector<int> ks;
  for (auto const &m : anger.members)
  {
    ks.push_back(*m.k);
  }
  CHECK(ks == std::vector<int>{19, 11, 19, 21, 5, 11, 11});
  CHECK(*preset_best_ensemble(Emotion::fear).members[5].features.lexicon == LexiconName::ANEW);
  CHECK(*preset_best_ensemble(Emotion::joy).members[5].features.lexicon == LexiconName::Combined);
  CHECK_FALSE(preset_best_ensemble(Emotion::sadness).members[6].k);
}

TEST_CASE("sweep on the synthetic set")
{
  TempDir    dir;
  auto const config = ExperimentConfig::load(write_synthetic(dir.path()));
  auto const ws     = Workspace::load(config, {Emotion::anger}, false);
  CHECK(ws.training(Emotion::anger).size() == 400);

  auto const result = run_sweep(config, ws, anger_options(dir / "out"));
  REQUIRE(result.rows.size() == 4);
  CHECK(result.rows[0].k == 11);
  CHECK(result.rows[1].k == 5);
  CHECK(result.rows[2].setup == "ensemble:pair");
  for (auto const &row : result.rows)
  {
    REQUIRE(row.report.ok());
    CHECK(*row.report.mean_pcc >= 0.95);
  }
  CHECK(result.rows[3].kind == RowKind::best);
  CHECK_FALSE(result.average_best);

  auto const table = read_tsv(dir / "out" / "sweep.tsv");
  REQUIRE(table.size() == 5);
  auto const &header = table[0];
  auto const  mean_col =
      static_cast<std::size_t>(std::find(header.begin(), header.end(), "mean_pcc") - header.begin());
  std::size_t best = 1;
  for (std::size_t r = 1; r < table.size(); ++r)
  {
    if (table[r][0] == "grid" && std::stod(table[r][mean_col]) > std::stod(table[best][mean_col]))
    {
      best = r;
    }
  }
  CHECK(table[4][0] == "best");
  CHECK(std::vector<std::string>(table[4].begin() + 1, table[4].end()) ==
        std::vector<std::string>(table[best].begin() + 1, table[best].end()));
  CHECK(fs::exists(dir / "out" / "sweep_ttest.tsv"));

  auto const folds = read_tsv(dir / "out" / "sweep_folds.tsv");
  REQUIRE(folds.size() == 1 + 3 * 6);
  CHECK(folds[6][2] == "mean");
  CHECK(folds[6][3] == table[1][mean_col]);
  for (int f = 1; f <= 5; ++f)
  {
    CHECK(folds[static_cast<std::size_t>(f)][3] == table[1][mean_col - 6 + static_cast<std::size_t>(f)]);
  }
}

TEST_CASE("best-row selection")
{
  auto row = [](double mean, int k, std::string cleaning) {
    SweepRow r;
    r.emotion         = Emotion::joy;
    r.k               = k;
    r.cleaning        = std::move(cleaning);
    r.report.mean_pcc = mean;
    return r;
  };
  std::vector<SweepRow> rows{row(0.5, 5, "raw")};
  CHECK(select_best(rows, Emotion::joy) == 0u);
  CHECK_FALSE(select_best(rows, Emotion::fear));
  rows.push_back(row(0.6, 7, "general"));
  CHECK(select_best(rows, Emotion::joy) == 1u);
  rows.push_back(row(0.6, 5, "general+stopwords"));
  CHECK(select_best(rows, Emotion::joy) == 2u);
  rows.push_back(row(0.6, 5, "raw"));
  CHECK(select_best(rows, Emotion::joy) == 3u);
  rows.push_back(row(0.6, 0, "-"));
  CHECK(select_best(rows, Emotion::joy) == 3u);
  SweepRow failed = row(0.9, 3, "raw");
  failed.report.mean_pcc.reset();
  rows.push_back(failed);
  CHECK(select_best(rows, Emotion::joy) == 3u);
}

TEST_CASE("grid point failures are recorded and the run continues")
{
  TempDir    dir;
  auto       config = ExperimentConfig::load(write_synthetic(dir.path()));
  config.sweep.features.push_back(FeatureSpec::of_lexicon(LexiconName::AI));
  config.sweep.ensembles.clear();
  auto const ws     = Workspace::load(config, {Emotion::anger}, false);
  auto const result = run_sweep(config, ws, anger_options(dir / "out"));
  REQUIRE(result.rows.size() == 5);
  CHECK(result.rows[0].report.ok());
  CHECK_FALSE(result.rows[2].report.ok());
  CHECK(result.rows[2].report.folds[0].error.find("AI") != std::string::npos);
  CHECK(read_file(dir / "out" / "sweep.tsv").find("failed: fold 1") != std::string::npos);
}

TEST_CASE("predict writes submissions and explanations")
{
  TempDir    dir;
  auto const config = ExperimentConfig::load(write_synthetic(dir.path()));
  auto const ws     = Workspace::load(config, {Emotion::anger}, true);
  auto const result = run_predict(config, ws, anger_options(dir / "out"));

  auto const &preds = result.predictions.at(Emotion::anger);
  REQUIRE(preds.size() == 40);
  auto const &test  = *ws.test(Emotion::anger);
  int         right = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
  {
    right += preds[i].rounded == *test[i].label;
  }
  CHECK(right >= 30);

  auto const submission = read_tsv(dir / "out" / "predictions" / "EI-oc_en_anger_pred.txt");
  CHECK(submission.size() == 41);
  CHECK(submission[1][0] == "2018-En-test-400");
  CHECK(submission[1][3].rfind(std::to_string(preds[0].rounded.value()) + ":", 0) == 0);

  REQUIRE(result.explanations.size() == 1);
  CHECK(result.explanations[0].instance_id == "2018-En-test-400");
  auto const json = read_file(dir / "out" / "explanations" / "2018-En-test-400.json");
  CHECK(ExplanationReport::from_json(json) == result.explanations[0]);
  CHECK(fs::exists(dir / "out" / "explanations" / "2018-En-test-400.txt"));

  auto opts = anger_options({});
  opts.ids  = std::vector<std::string>{"nope"};
  CHECK_THROWS_AS(run_predict(config, ws, opts), LookupError);
}

TEST_CASE("missing test embeddings are fatal and listed")
{
  TempDir    dir;
  auto const path  = write_synthetic(dir.path());
  auto const store = load_embeddings(dir / "synth.emb");
  EmbeddingStore trimmed("synth", EmbeddingLevel::sentence, 8);
  for (auto const &id : store.ids())
  {
    if (id != "2018-En-test-405" && id != "2018-En-test-410")
    {
      trimmed.add(id, store.rows(id));
    }
  }
  write_embeddings(trimmed, dir / "synth.emb");
  auto const config = ExperimentConfig::load(path);
  auto const ws     = Workspace::load(config, {Emotion::anger}, true);
  try
  {
    run_predict(config, ws, anger_options({}));
    FAIL("expected a lookup error");
  }
  catch (LookupError const &e)
  {
    std::string const what = e.what();
    CHECK(what.find("2018-En-test-405") != std::string::npos);
    CHECK(what.find("2018-En-test-410") != std::string::npos);
  }

  auto const report = validate_artifacts(config, {Emotion::anger});
  CHECK_FALSE(report.ok());
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].find("2018-En-test-405") != std::string::npos);
}

TEST_CASE("validation of a clean setup")
{
  TempDir    dir;
  auto const config = ExperimentConfig::load(write_synthetic(dir.path()));
  auto const report = validate_artifacts(config, {Emotion::anger});
  CHECK(report.ok());
  CHECK(report.warnings.empty());

  auto broken = config;
  broken.sweep.k.push_back(4);
  broken.sweep.features.push_back(FeatureSpec::of_embedding("roberta"));
  auto const bad = validate_artifacts(broken, {Emotion::anger, Emotion::joy});
  CHECK(bad.failures.size() >= 3);
}

TEST_CASE("command line")
{
  TempDir    dir;
  auto const config = write_synthetic(dir.path()).string();
  std::string out;
  CHECK(cli({}, &out) == 2);
  CHECK(cli({"frobnicate"}, &out) == 2);
  CHECK(cli({"sweep"}, &out) == 2);
  CHECK(cli({"validate", "--config", config}, &out) == 0);
  CHECK(out.find("validation passed") != std::string::npos);
  CHECK(cli({"sweep", "--config", config, "--emotion", "anger", "--out", (dir / "s").string()}, &out) == 0);
  CHECK(fs::exists(dir / "s" / "sweep.tsv"));
  CHECK(cli({"sweep", "--config", config, "--emotion", "rage"}, &out) == 1);
  CHECK(cli({"explain", "--config", config, "--ids", "2018-En-test-401,2018-En-test-402"}, &out) == 0);
  CHECK(out.find("Instance 2018-En-test-401") != std::string::npos);
  CHECK(out.find("Instance 2018-En-test-402") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
  CHECK(cli({"predict", "--config", config, "--jobs", "3"}, &out) == 0);
  CHECK(fs::exists(dir / "out" / "predictions" / "EI-oc_en_anger_pred.txt"));
}

TEST_CASE("cleaning variants are compared with t-tests")
{
  TempDir dir;
  auto    config = ExperimentConfig::load(write_synthetic(dir.path()));
  config.sweep.cleaning = {CleaningConfig::raw(), CleaningConfig::preprocessed()};
  config.sweep.k        = {std::optional<int>(7)};
  config.sweep.ensembles.clear();
  auto const ws     = Workspace::load(config, {Emotion::anger}, false);
  auto const result = run_sweep(config, ws, anger_options(dir / "out"));
  REQUIRE(result.ttests.size() == 1);
  auto const &t = result.ttests[0];
  CHECK(t.cleaning_a == "raw");
  CHECK(t.cleaning_b == "general");
  REQUIRE(t.result);
  CHECK(t.result->t == 0.0);
  CHECK(t.result->p == doctest::Approx(1.0));
  auto const rows = read_tsv(dir / "out" / "sweep_ttest.tsv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "anger");
  CHECK(rows[1][2] == "7");
}
