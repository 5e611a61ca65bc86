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

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace emoknn {

/// Which cleaning stages run. remove_stopwords requires general.
struct CleaningConfig
{
  bool general          = false;
  bool remove_stopwords = false;
  bool lowercase        = false;

  static CleaningConfig raw()
  {
    return {};
  }
  static CleaningConfig preprocessed()
  {
    return {true, false, false};
  }
  static CleaningConfig without_stopwords()
  {
    return {true, true, false};
  }

  /// Throws ValidationError when remove_stopwords is set without general.
  void validate() const;

  /// "raw", "general" or "general+stopwords" (with a "+lower" suffix when lowercasing).
  std::string name() const;
  static CleaningConfig parse(std::string_view name);

  friend bool operator==(CleaningConfig const &, CleaningConfig const &) = default;
};

/// Literal string -> description table, matched longest key first.
///
/// Keys made only of ASCII letters and digits (e.g. "XD") only match where no letter or other
/// character kept by cleaning touches them,
/// everything else matches anywhere in the text.
class ReplacementTable
{
public:
  ReplacementTable() = default;
  explicit ReplacementTable(std::vector<std::pair<std::string, std::string>> entries);

  /// TSV `key \t description`, UTF-8. Blank lines and lines starting with "#\t" are skipped.
  static ReplacementTable load(std::filesystem::path const &path);

  /// Replaces every match with " description ".
  std::string apply(std::string_view text) const;

  std::size_t size() const noexcept
  {
    return entries_.size();
  }
  bool empty() const noexcept
  {
    return entries_.empty();
  }

private:
  // sorted by key length descending, then key
  std::vector<std::pair<std::string, std::string>> entries_;
  std::size_t                                      max_key_len_ = 0;
};

/// Emoticons such as ":)" -> "smiley face".
class EmoticonTable : public ReplacementTable
{
public:
  using ReplacementTable::ReplacementTable;
  EmoticonTable(ReplacementTable t)
    : ReplacementTable(std::move(t))
  {}
};

/// Unicode emoji sequences -> textual description (letters and spaces only).
class EmojiTable : public ReplacementTable
{
public:
  EmojiTable() = default;
  /// Throws ValidationError for keys that are not valid UTF-8 or descriptions with
  /// characters other than letters and spaces.
  explicit EmojiTable(std::vector<std::pair<std::string, std::string>> entries);
  static EmojiTable load(std::filesystem::path const &path);
};

class StopwordList
{
public:
  StopwordList() = default;
  explicit StopwordList(std::vector<std::string> words);

  /// One word per line.
  static StopwordList load(std::filesystem::path const &path);

  /// Case-insensitive.
  bool contains(std::string_view word) const;

  std::size_t size() const noexcept
  {
    return words_.size();
  }
  bool empty() const noexcept
  {
    return words_.empty();
  }

private:
  std::unordered_set<std::string> words_;
};

/// The resources cleaning depends on, loaded once and shared read-only.
struct CleaningResources
{
  EmoticonTable emoticons;
  EmojiTable    emojis;
  StopwordList  stopwords;
};

/// Tweet cleaning. With config.general unset the text is returned unchanged; otherwise
/// emojis and emoticons become descriptions, @-tags are dropped, '&' becomes "and", '#' is
/// removed, punctuation and digits are deleted and whitespace is collapsed. Stop-word removal
/// runs last.
std::string clean(std::string_view text, CleaningConfig const &config, EmoticonTable const &emoticons,
                  EmojiTable const &emojis, StopwordList const &stopwords);

inline std::string clean(std::string_view text, CleaningConfig const &config,
                         CleaningResources const &res)
{
  return clean(text, config, res.emoticons, res.emojis, res.stopwords);
}

/// Whitespace split, no empty tokens.
std::vector<std::string> tokenize(std::string_view text);

/// True for a well-formed UTF-8 byte sequence (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view text) noexcept;

}  // namespace emoknn
