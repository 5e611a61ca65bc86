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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emoknn {

enum class Emotion : std::uint8_t
{
  anger,
  fear,
  joy,
  sadness
};

inline constexpr Emotion kAllEmotions[] = {Emotion::anger, Emotion::fear, Emotion::joy,
                                           Emotion::sadness};

std::string_view to_string(Emotion e) noexcept;
Emotion          parse_emotion(std::string_view name);

enum class Split : std::uint8_t
{
  train,
  dev,
  test,
  merged
};

std::string_view to_string(Split s) noexcept;

/// One of the four ordinal intensity levels 0..3.
class EmotionClass
{
public:
  static constexpr int kCount = 4;

  /// Throws ValidationError for values outside 0..3.
  explicit EmotionClass(int value);

  int value() const noexcept
  {
    return value_;
  }

  friend bool operator==(EmotionClass, EmotionClass) = default;
  friend auto operator<=>(EmotionClass, EmotionClass) = default;

private:
  int value_;
};

/// Canonical intensity-field text, e.g. "2: moderate amount of anger can be inferred".
std::string describe(EmotionClass label, Emotion emotion);

struct LabeledInstance
{
  std::string                 id;
  std::string                 text;  // verbatim, uncleaned
  Emotion                     emotion;
  std::optional<EmotionClass> label;
};

/// Instances of a single emotion in load order. Immutable once built.
class Dataset
{
public:
  /// Validates the emotion, id-uniqueness and non-empty-text invariants.
  Dataset(Emotion emotion, Split split, std::vector<LabeledInstance> instances);

  Emotion emotion() const noexcept
  {
    return emotion_;
  }
  Split split() const noexcept
  {
    return split_;
  }
  std::span<LabeledInstance const> instances() const noexcept
  {
    return instances_;
  }
  std::size_t size() const noexcept
  {
    return instances_.size();
  }
  bool empty() const noexcept
  {
    return instances_.empty();
  }
  LabeledInstance const &operator[](std::size_t i) const
  {
    return instances_[i];
  }

  /// Gold labels as doubles; throws ValidationError if any instance is unlabeled.
  std::vector<double> gold() const;

  /// Header line of the source file, reused when writing submissions.
  std::string const &header() const noexcept
  {
    return header_;
  }
  void set_header(std::string header)
  {
    header_ = std::move(header);
  }

private:
  Emotion                      emotion_;
  Split                        split_;
  std::vector<LabeledInstance> instances_;
  std::string                  header_ = "ID\tTweet\tAffect Dimension\tIntensity Class";
};

struct PredictionRecord
{
  std::string  id;
  double       raw_score;
  EmotionClass rounded_label;
};

/// Reads an EI-oc TSV file: one header line, then `id \t text \t emotion \t class` rows.
/// The class field is either `<int>: description` or `NONE` (unlabeled).
/// An empty file (not even a header) yields an empty dataset of the requested emotion,
/// which therefore has to be supplied.
Dataset parse_dataset(std::filesystem::path const &path, Split split);
Dataset parse_dataset(std::filesystem::path const &path, Split split, Emotion emotion);

/// Same as parse_dataset, reading from memory. `source` is only used in error messages.
Dataset parse_dataset_text(std::string_view contents, Split split,
                           std::optional<Emotion> emotion = std::nullopt,
                           std::string const     &source  = "<memory>");

/// train instances followed by dev instances.
Dataset merge(Dataset const &train, Dataset const &dev);

/// Writes the submission file: template rows with the class field rewritten.
void write_predictions(std::span<PredictionRecord const> records, Dataset const &templ,
                       std::filesystem::path const &path);

/// Submission contents as a string; write_predictions is this plus file I/O.
std::string format_predictions(std::span<PredictionRecord const> records, Dataset const &templ);

}  // namespace emoknn
