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
#include "emoknn/cli.hpp"

#include "emoknn/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace emoknn {

namespace {

struct CommonArgs
{
  std::string                config;
  std::string                emotion = "all";
  std::string                out;
  std::optional<std::uint64_t> seed;
  int                        jobs = 1;
  std::vector<std::string>   ids;
};

void add_common(CLI::App *cmd, CommonArgs &args)
{
  cmd->add_option("--config", args.config, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--emotion", args.emotion, "emotion name or 'all'");
  cmd->add_option("--seed", args.seed, "fold seed override");
  cmd->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
}

std::vector<Emotion> emotions_of(CommonArgs const &args, ExperimentConfig const &config)
{
  if (args.emotion == "all")
  {
    return config.emotions;
  }
  return {parse_emotion(args.emotion)};
}

RunOptions options_of(CommonArgs const &args, ExperimentConfig const &config)
{
  RunOptions opts;
  opts.emotions = emotions_of(args, config);
  opts.out_dir  = args.out.empty() ? config.output : fs::path(args.out);
  opts.seed     = args.seed;
  opts.jobs     = args.jobs;
  if (!args.ids.empty())
  {
    opts.ids = args.ids;
  }
  return opts;
}

}  // namespace

int run_cli(int argc, char const *const *argv, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Explainable weighted kNN ensembles for ordinal emotion intensity"};
  app.require_subcommand(1);

  CommonArgs sweep_args;
  auto      *sweep = app.add_subcommand("sweep", "cross-validate the configured grid");
  add_common(sweep, sweep_args);
  sweep->add_option("--out", sweep_args.out, "output directory");

  CommonArgs predict_args;
  auto      *predict = app.add_subcommand("predict", "train on train+dev and label the test split");
  add_common(predict, predict_args);
  predict->add_option("--out", predict_args.out, "output directory");
  predict->add_option("--ids", predict_args.ids, "test ids to explain")->delimiter(',');

  CommonArgs explain_args;
  auto      *explain = app.add_subcommand("explain", "print explanations for test ids");
  add_common(explain, explain_args);
  explain->add_option("--out", explain_args.out, "also write reports here");
  explain->add_option("--ids", explain_args.ids, "test ids to explain")->delimiter(',')->required();

  CommonArgs validate_args;
  auto      *validate = app.add_subcommand("validate", "check datasets, lexicons, embeddings and the grid");
  add_common(validate, validate_args);

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &e)
  {
    out << app.help();
    return 0;
  }
  catch (CLI::ParseError const &e)
  {
    err << e.what() << '\n';
    return 2;
  }

  try
  {
    if (*sweep)
    {
      auto const config = ExperimentConfig::load(sweep_args.config);
      auto const opts   = options_of(sweep_args, config);
      auto const ws     = Workspace::load(config, opts.emotions, false);
      auto const result = run_sweep(config, ws, opts);
      out << result.format_table(config.folds);
      return 0;
    }
    if (*predict || *explain)
    {
      auto const &args   = *predict ? predict_args : explain_args;
      auto const  config = ExperimentConfig::load(args.config);
      auto        opts   = options_of(args, config);
      if (*explain && args.out.empty())
      {
        opts.out_dir.clear();
      }
      auto const ws     = Workspace::load(config, opts.emotions, true);
      auto const result = run_predict(config, ws, opts, static_cast<bool>(*predict));
      for (auto const &w : result.warnings)
      {
        err << "warning: " << w << '\n';
      }
      if (*explain)
      {
        for (auto const &r : result.explanations)
        {
          out << r.to_text() << '\n';
        }
      }
      else
      {
        for (auto const &[e, preds] : result.predictions)
        {
          out << to_string(e) << ": " << preds.size() << " predictions\n";
        }
      }
      return 0;
    }
    auto const config = ExperimentConfig::load(validate_args.config);
    auto const report = validate_artifacts(config, emotions_of(validate_args, config));
    for (auto const &w : report.warnings)
    {
      out << "WARN " << w << '\n';
    }
    for (auto const &f : report.failures)
    {
      out << "FAIL " << f << '\n';
    }
    out << (report.ok() ? "validation passed\n" : "validation failed\n");
    return report.ok() ? 0 : 1;
  }
  catch (std::exception const &e)
  {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace emoknn
