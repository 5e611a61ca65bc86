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

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace emoknn {

enum class LexiconName
{
  VAD,
  EMOLEX,
  AI,
  ANEW,
  Warriner,
  Combined
};

/// Concatenation order of the combined vector.
inline constexpr std::array<LexiconName, 5> kCombinedOrder = {
    LexiconName::VAD, LexiconName::EMOLEX, LexiconName::AI, LexiconName::ANEW, LexiconName::Warriner};

std::string_view to_string(LexiconName name) noexcept;
LexiconName      parse_lexicon_name(std::string_view name);

struct LexiconSchema
{
  LexiconName                           name;
  int                                   width;
  std::vector<std::pair<double, double>> score_range;  // one (min, max) per column

  /// Published widths: VAD 3, EMOLEX 10, AI 4, ANEW 6, Warriner 63, Combined 86.
  static LexiconSchema standard(LexiconName name);
};

/// Column layout of a lexicon distribution file, read from a JSON sidecar:
///
///   {"delimiter": "\t" | "," | "whitespace", "header_lines": 1,
///    "layout": "wide", "word_column": 0, "score_columns": [1, 2, 3]}
///
/// or, for one-row-per-(word, category) files such as EMOLEX and the affect intensity lexicon,
///
///   {"layout": "long", "word_column": 0, "category_column": 1, "value_column": 2,
///    "categories": ["anger", "anticipation", ...]}
struct LexiconDescriptor
{
  enum class Layout
  {
    wide,
    long_
  };

  std::string              delimiter    = "\t";
  int                      header_lines = 0;
  Layout                   layout       = Layout::wide;
  int                      word_column  = 0;
  std::vector<int>         score_columns;
  int                      category_column = 1;
  int                      value_column    = 2;
  std::vector<std::string> categories;

  int width() const noexcept
  {
    return static_cast<int>(layout == Layout::wide ? score_columns.size() : categories.size());
  }

  static LexiconDescriptor parse(std::string_view json);
  static LexiconDescriptor load(std::filesystem::path const &path);
};

/// Word -> score vector. Keys are lowercase; immutable after load.
class Lexicon
{
public:
  using Vector = Eigen::VectorXd;

  Lexicon(LexiconSchema schema, std::unordered_map<std::string, Vector> entries);

  LexiconSchema const &schema() const noexcept
  {
    return schema_;
  }
  int width() const noexcept
  {
    return schema_.width;
  }
  std::size_t size() const noexcept
  {
    return entries_.size();
  }

  /// Stored vector for a word (case-insensitive), nullptr if absent.
  Vector const *find(std::string_view word) const;

private:
  LexiconSchema                           schema_;
  std::unordered_map<std::string, Vector> entries_;
};

/// Loads a lexicon; the sidecar descriptor defaults to `<path>.json`.
Lexicon load_lexicon(std::filesystem::path const &path, LexiconSchema const &schema);
Lexicon load_lexicon(std::filesystem::path const &path, LexiconSchema const &schema,
                     LexiconDescriptor const &descriptor);

/// Stored vector, or zeros when the word is absent.
Eigen::VectorXd word_scores(Lexicon const &lex, std::string_view word);

/// Mean of word_scores over all tokens; absent words count as zero vectors.
Eigen::VectorXd tweet_lexicon_vector(Lexicon const &lex, std::span<std::string const> tokens);

/// Concatenated tweet vectors of VAD, EMOLEX, AI, ANEW, Warriner (86 values).
Eigen::VectorXd combined_vector(std::span<Lexicon const *const> lexicons,
                                std::span<std::string const> tokens);

/// The five lexicons, addressable by name; Combined is derived on demand.
class LexiconSet
{
public:
  void add(Lexicon lex);

  bool has(LexiconName name) const;
  Lexicon const &get(LexiconName name) const;

  /// Width of `name`'s tweet vector (86 for Combined).
  int width(LexiconName name) const;

  /// Tweet vector under `name`; Combined requires all five lexicons.
  Eigen::VectorXd tweet_vector(LexiconName name, std::span<std::string const> tokens) const;

private:
  std::array<std::optional<Lexicon>, 5> slots_;
};

}  // namespace emoknn
