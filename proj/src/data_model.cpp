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
#include "emoknn/data_model.hpp"

#include "emoknn/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace emoknn {

std::string_view to_string(Emotion e) noexcept
{
  switch (e)
  {
  case Emotion::anger:
    return "anger";
  case Emotion::fear:
    return "fear";
  case Emotion::joy:
    return "joy";
  case Emotion::sadness:
    return "sadness";
  }
  return "?";
}

Emotion parse_emotion(std::string_view name)
{
  for (auto e : kAllEmotions)
  {
    if (to_string(e) == name)
    {
      return e;
    }
  }
  throw ValidationError("unknown emotion '" + std::string(name) + "'");
}

std::string_view to_string(Split s) noexcept
{
  switch (s)
  {
  case Split::train:
    return "train";
  case Split::dev:
    return "dev";
  case Split::test:
    return "test";
  case Split::merged:
    return "merged";
  }
  return "?";
}

EmotionClass::EmotionClass(int value)
  : value_(value)
{
  if (value < 0 || value >= kCount)
  {
    throw ValidationError("emotion class must be in 0..3, got " + std::to_string(value));
  }
}

std::string describe(EmotionClass label, Emotion emotion)
{
  static constexpr std::string_view amount[] = {"no", "low amount of", "moderate amount of",
                                                "high amount of"};
  std::string out = std::to_string(label.value());
  out += ": ";
  out += amount[label.value()];
  out += ' ';
  out += to_string(emotion);
  out += " can be inferred";
  return out;
}

Dataset::Dataset(Emotion emotion, Split split, std::vector<LabeledInstance> instances)
  : emotion_(emotion)
  , split_(split)
  , instances_(std::move(instances))
{
  std::unordered_set<std::string_view> seen;
  seen.reserve(instances_.size());
  for (auto const &inst : instances_)
  {
    if (inst.id.empty())
    {
      throw ValidationError("instance with empty id");
    }
    if (inst.text.empty())
    {
      throw ValidationError("instance " + inst.id + " has empty text");
    }
    if (inst.emotion != emotion_)
    {
      throw ValidationError("instance " + inst.id + " has emotion " +
                            std::string(to_string(inst.emotion)) + ", dataset is " +
                            std::string(to_string(emotion_)));
    }
    if (!seen.insert(inst.id).second)
    {
      throw ValidationError("duplicate instance id " + inst.id);
    }
  }
}

std::vector<double> Dataset::gold() const
{
  std::vector<double> out;
  out.reserve(instances_.size());
  for (auto const &inst : instances_)
  {
    if (!inst.label)
    {
      throw ValidationError("instance " + inst.id + " has no gold label");
    }
    out.push_back(inst.label->value());
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t                   start = 0;
  while (true)
  {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos)
    {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<Emotion> emotion_from_name(std::string const &source)
{
  for (auto e : kAllEmotions)
  {
    if (source.find(to_string(e)) != std::string::npos)
    {
      return e;
    }
  }
  return std::nullopt;
}

std::string read_file(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw LookupError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Dataset parse_dataset_text(std::string_view contents, Split split, std::optional<Emotion> emotion,
                           std::string const &source)
{
  std::vector<LabeledInstance> rows;
  std::string                  header;
  std::size_t                  line_no = 0;
  std::size_t                  start   = 0;
  while (start < contents.size())
  {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos)
    {
      end = contents.size();
    }
    std::string_view line = contents.substr(start, end - start);
    start                 = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r')
    {
      line.remove_suffix(1);
    }
    if (line_no == 1)
    {
      header = std::string(line);
      continue;
    }
    if (line.empty())
    {
      continue;
    }

    auto fields = split_tabs(line);
    if (fields.size() != 4)
    {
      throw ParseError(source, line_no,
                       "expected 4 tab-separated columns, got " + std::to_string(fields.size()));
    }

    LabeledInstance inst;
    inst.id   = std::string(fields[0]);
    inst.text = std::string(fields[1]);
    try
    {
      inst.emotion = parse_emotion(fields[2]);
    }
    catch (ValidationError const &e)
    {
      throw ParseError(source, line_no, e.what());
    }

    auto field = fields[3];
    if (field == "NONE")
    {
      if (split != Split::test)
      {
        throw ParseError(source, line_no, "unlabeled row outside a test split");
      }
    }
    else
    {
      auto prefix = field.substr(0, field.find(':'));
      int  value  = -1;
      auto [ptr, ec] = std::from_chars(prefix.data(), prefix.data() + prefix.size(), value);
      if (ec != std::errc{} || ptr != prefix.data() + prefix.size() || prefix.empty())
      {
        throw ParseError(source, line_no, "unparsable intensity class '" + std::string(field) + "'");
      }
      try
      {
        inst.label = EmotionClass(value);
      }
      catch (ValidationError const &e)
      {
        throw ParseError(source, line_no, e.what());
      }
    }
    if (emotion && inst.emotion != *emotion)
    {
      throw ParseError(source, line_no,
                       "row emotion " + std::string(to_string(inst.emotion)) + " differs from " +
                           std::string(to_string(*emotion)));
    }
    if (!emotion)
    {
      emotion = inst.emotion;
    }
    rows.push_back(std::move(inst));
  }

  if (!emotion)
  {
    emotion = emotion_from_name(source);
    if (!emotion)
    {
      throw ValidationError(source + ": no rows and no emotion given");
    }
  }
  Dataset ds(*emotion, split, std::move(rows));
  if (!header.empty())
  {
    ds.set_header(std::move(header));
  }
  return ds;
}

Dataset parse_dataset(std::filesystem::path const &path, Split split)
{
  return parse_dataset_text(read_file(path), split, std::nullopt, path.string());
}

Dataset parse_dataset(std::filesystem::path const &path, Split split, Emotion emotion)
{
  return parse_dataset_text(read_file(path), split, emotion, path.string());
}

Dataset merge(Dataset const &train, Dataset const &dev)
{
  if (train.emotion() != dev.emotion())
  {
    throw ValidationError("cannot merge " + std::string(to_string(train.emotion())) + " with " +
                          std::string(to_string(dev.emotion())));
  }
  std::vector<LabeledInstance> all(train.instances().begin(), train.instances().end());
  all.insert(all.end(), dev.instances().begin(), dev.instances().end());
  Dataset out(train.emotion(), Split::merged, std::move(all));
  out.set_header(train.header());
  return out;
}

std::string format_predictions(std::span<PredictionRecord const> records, Dataset const &templ)
{
  std::unordered_map<std::string_view, PredictionRecord const *> by_id;
  std::vector<std::string>                                       extra;
  for (auto const &r : records)
  {
    if (!by_id.emplace(r.id, &r).second)
    {
      extra.push_back(r.id + " (duplicate)");
    }
  }

  std::vector<std::string> missing;
  for (auto const &inst : templ.instances())
  {
    if (!by_id.contains(inst.id))
    {
      missing.push_back(inst.id);
    }
  }
  std::unordered_set<std::string_view> template_ids;
  for (auto const &inst : templ.instances())
  {
    template_ids.insert(inst.id);
  }
  for (auto const &r : records)
  {
    if (!template_ids.contains(r.id))
    {
      extra.push_back(r.id);
    }
  }

  if (!missing.empty() || !extra.empty())
  {
    std::string msg = "prediction ids do not match the template;";
    auto        list = [&msg](char const *what, std::vector<std::string> const &ids) {
      if (ids.empty())
      {
        return;
      }
      msg += ' ';
      msg += what;
      msg += ':';
      for (auto const &id : ids)
      {
        msg += ' ' + id;
      }
    };
    list("missing", missing);
    list("unexpected", extra);
    throw ValidationError(msg);
  }

  std::string out = templ.header();
  out += '\n';
  for (auto const &inst : templ.instances())
  {
    auto const &rec = *by_id.at(inst.id);
    out += inst.id;
    out += '\t';
    out += inst.text;
    out += '\t';
    out += to_string(inst.emotion);
    out += '\t';
    out += describe(rec.rounded_label, inst.emotion);
    out += '\n';
  }
  return out;
}

void write_predictions(std::span<PredictionRecord const> records, Dataset const &templ,
                       std::filesystem::path const &path)
{
  auto          contents = format_predictions(records, templ);
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw LookupError("cannot write " + path.string());
  }
  out << contents;
}

}  // namespace emoknn
