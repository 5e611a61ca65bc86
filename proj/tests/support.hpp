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

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace emoknn::testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
  explicit TempDir(std::string const &tag = "emoknn")
  {
    static std::atomic<int> counter{0};
    std::random_device      rd;
    path_ = fs::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(TempDir const &)            = delete;
  TempDir &operator=(TempDir const &) = delete;

  fs::path const &path() const noexcept
  {
    return path_;
  }
  fs::path operator/(std::string const &name) const
  {
    return path_ / name;
  }

private:
  fs::path path_;
};

inline void write_file(fs::path const &path, std::string const &contents)
{
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

inline std::string read_file(fs::path const &path)
{
  std::ifstream      in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string ei_row(std::string const &id, std::string const &text, int label,
                          std::string const &emotion = "anger")
{
  char const *level[] = {"no", "low amount of", "moderate amount of", "high amount of"};
  return id + "\t" + text + "\t" + emotion + "\t" + std::to_string(label) + ": " + level[label] + " " + emotion +
         " can be inferred\n";
}

inline std::string const kHeader = "ID\tTweet\tAffect Dimension\tIntensity Class\n";

inline double const kPi            = 3.14159265358979323846;
inline double       kSyntheticNoise = 0.16;

/// Ordinal 4-class anger fixture in 8 dimensions: class c clusters around the direction at
/// c * 30 degrees in the first two dimensions, so neighboring classes are the closest.
///
/// Writes train (80 per class), dev (20 per class) and test (10 per class) files, a
/// sentence-level embedding store "synth" and config.json, and returns the config path.
inline fs::path write_synthetic(fs::path const &dir, std::uint64_t seed = 7)
{
  std::mt19937_64                  rng(seed);
  std::normal_distribution<double> noise(0.0, kSyntheticNoise);
  EmbeddingStore                   store("synth", EmbeddingLevel::sentence, 8);

  auto make = [&](std::string const &split, int per_class, int &counter) {
    std::string out = kHeader;
    for (int i = 0; i < per_class; ++i)
    {
      for (int c = 0; c < 4; ++c)
      {
        auto const      id = "2018-En-" + split + "-" + std::to_string(counter++);
        Eigen::MatrixXd row(1, 8);
        for (int d = 0; d < 8; ++d)
        {
          row(0, d) = 0.15 + noise(rng);
        }
        double const angle = c * kPi / 6.0;
        row(0, 0) += std::cos(angle);
        row(0, 1) += std::sin(angle);
        store.add(id, row);
        out += ei_row(id, "synthetic tweet " + id + " about things", c);
      }
    }
    return out;
  };
  int counter = 0;
  write_file(dir / "anger-train.txt", make("train", 80, counter));
  write_file(dir / "anger-dev.txt", make("dev", 20, counter));
  write_file(dir / "anger-test.txt", make("test", 10, counter));
  write_embeddings(store, dir / "synth.emb");

  auto const config = dir / "config.json";
  write_file(config, R"({
  "seed": 20180601,
  "folds": 5,
  "output": "out",
  "emotions": ["anger"],
  "data": {"anger": {"train": "anger-train.txt", "dev": "anger-dev.txt", "test": "anger-test.txt"}},
  "embeddings": [{"model": "synth", "files": ["synth.emb"]}],
  "sweep": {
    "features": [{"embedding": "synth"}],
    "cleaning": ["raw"],
    "k": ["auto", 5],
    "aggregation": "weighted_mean",
    "ensembles": ["pair"]
  },
  "ensembles": {
    "pair": {"members": [
      {"name": "synth auto", "embedding": "synth", "cleaning": "raw", "k": "auto"},
      {"name": "synth k5 majority", "embedding": "synth", "cleaning": "raw", "k": 5, "aggregation": "weighted_majority"}
    ]}
  },
  "predict": {"ensemble": "pair", "explain_ids": ["2018-En-test-400"]}
}
)");
  return config;
}

}  // namespace emoknn::testing
