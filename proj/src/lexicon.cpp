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
#include "emoknn/lexicon.hpp"

#include "emoknn/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace emoknn {

namespace {

std::string lower(std::string_view s)
{
  std::string out(s);
  for (auto &c : out)
  {
    if (c >= 'A' && c <= 'Z')
    {
      c = static_cast<char>(c - 'A' + 'a');
    }
  }
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line, std::string const &delimiter)
{
  std::vector<std::string_view> out;
  if (delimiter == "whitespace")
  {
    std::size_t i = 0;
    while (i < line.size())
    {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      {
        ++i;
      }
      auto start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t')
      {
        ++i;
      }
      if (i > start)
      {
        out.push_back(line.substr(start, i - start));
      }
    }
    return out;
  }
  std::size_t start = 0;
  while (true)
  {
    auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos)
    {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + delimiter.size();
  }
}

std::optional<double> to_double(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '"'))
  {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '"'))
  {
    s.remove_suffix(1);
  }
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
  {
    return std::nullopt;
  }
  return value;
}

std::string_view unquote(std::string_view s)
{
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
  {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

std::string_view to_string(LexiconName name) noexcept
{
  switch (name)
  {
  case LexiconName::VAD:
    return "VAD";
  case LexiconName::EMOLEX:
    return "EMOLEX";
  case LexiconName::AI:
    return "AI";
  case LexiconName::ANEW:
    return "ANEW";
  case LexiconName::Warriner:
    return "Warriner";
  case LexiconName::Combined:
    return "Combined";
  }
  return "?";
}

LexiconName parse_lexicon_name(std::string_view name)
{
  for (auto n : {LexiconName::VAD, LexiconName::EMOLEX, LexiconName::AI, LexiconName::ANEW,
                 LexiconName::Warriner, LexiconName::Combined})
  {
    if (lower(to_string(n)) == lower(name))
    {
      return n;
    }
  }
  throw ValidationError("unknown lexicon '" + std::string(name) + "'");
}

LexiconSchema LexiconSchema::standard(LexiconName name)
{
  auto uniform = [name](int width, double lo, double hi) {
    return LexiconSchema{name, width, std::vector<std::pair<double, double>>(width, {lo, hi})};
  };
  switch (name)
  {
  case LexiconName::VAD:
    return uniform(3, 0.0, 1.0);
  case LexiconName::EMOLEX:
    return uniform(10, 0.0, 1.0);
  case LexiconName::AI:
    return uniform(4, 0.0, 1.0);
  case LexiconName::ANEW:
    return uniform(6, 0.0, 10.0);
  case LexiconName::Warriner:
    return uniform(63, 0.0, 1000.0);
  case LexiconName::Combined:
  {
    LexiconSchema out{name, 0, {}};
    for (auto part : kCombinedOrder)
    {
      auto s = standard(part);
      out.width += s.width;
      out.score_range.insert(out.score_range.end(), s.score_range.begin(), s.score_range.end());
    }
    return out;
  }
  }
  throw ValidationError("unknown lexicon schema");
}

LexiconDescriptor LexiconDescriptor::parse(std::string_view text)
{
  LexiconDescriptor d;
  try
  {
    auto j         = nlohmann::json::parse(text);
    d.delimiter    = j.value("delimiter", std::string("\t"));
    d.header_lines = j.value("header_lines", 0);
    auto layout    = j.value("layout", std::string("wide"));
    if (layout == "wide")
    {
      d.layout        = Layout::wide;
      d.score_columns = j.at("score_columns").get<std::vector<int>>();
    }
    else if (layout == "long")
    {
      d.layout          = Layout::long_;
      d.category_column = j.value("category_column", 1);
      d.value_column    = j.value("value_column", 2);
      d.categories      = j.at("categories").get<std::vector<std::string>>();
    }
    else
    {
      throw ValidationError("unknown lexicon layout '" + layout + "'");
    }
    d.word_column = j.value("word_column", 0);
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ValidationError(std::string("bad lexicon descriptor: ") + e.what());
  }
  if (d.delimiter.empty() || d.header_lines < 0 || d.width() == 0)
  {
    throw ValidationError("bad lexicon descriptor: empty delimiter, negative header count or no columns");
  }
  return d;
}

LexiconDescriptor LexiconDescriptor::load(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw LookupError("cannot open lexicon descriptor " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Lexicon::Lexicon(LexiconSchema schema, std::unordered_map<std::string, Vector> entries)
  : schema_(std::move(schema))
  , entries_(std::move(entries))
{
  if (static_cast<int>(schema_.score_range.size()) != schema_.width)
  {
    throw ValidationError("lexicon schema declares " + std::to_string(schema_.width) +
                          " columns but " + std::to_string(schema_.score_range.size()) + " ranges");
  }
  for (auto const &[word, v] : entries_)
  {
    if (v.size() != schema_.width)
    {
      throw ValidationError("lexicon entry '" + word + "' has width " + std::to_string(v.size()));
    }
    for (int c = 0; c < v.size(); ++c)
    {
      auto [lo, hi] = schema_.score_range[c];
      if (!(v[c] >= lo && v[c] <= hi))
      {
        throw ValidationError("lexicon entry '" + word + "' column " + std::to_string(c) +
                              " outside score range");
      }
    }
  }
}

Lexicon::Vector const *Lexicon::find(std::string_view word) const
{
  auto it = entries_.find(lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon load_lexicon(std::filesystem::path const &path, LexiconSchema const &schema)
{
  auto sidecar = path;
  sidecar += ".json";
  return load_lexicon(path, schema, LexiconDescriptor::load(sidecar));
}

Lexicon load_lexicon(std::filesystem::path const &path, LexiconSchema const &schema,
                     LexiconDescriptor const &desc)
{
  if (desc.width() != schema.width)
  {
    throw ValidationError(path.string() + ": descriptor declares " + std::to_string(desc.width()) +
                          " score columns, " + std::string(to_string(schema.name)) + " has " +
                          std::to_string(schema.width));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw LookupError("cannot open lexicon " + path.string());
  }

  auto const source = path.string();
  auto const width  = schema.width;

  std::unordered_map<std::string, Eigen::VectorXd> entries;
  // long layout: which (word, category) cells were filled already
  std::unordered_map<std::string, std::vector<bool>> filled;

  auto check_range = [&](std::size_t line_no, int col, double v) {
    auto [lo, hi] = schema.score_range[col];
    if (!(v >= lo && v <= hi))
    {
      throw ParseError(source, line_no, "score " + std::to_string(v) + " outside [" +
                                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
    {
      line.pop_back();
    }
    if (static_cast<int>(line_no) <= desc.header_lines || line.empty())
    {
      continue;
    }
    auto fields = split_fields(line, desc.delimiter);
    auto need   = [&](int col) {
      if (col < 0 || col >= static_cast<int>(fields.size()))
      {
        throw ParseError(source, line_no,
                         "expected at least " + std::to_string(col + 1) + " columns, got " +
                             std::to_string(fields.size()));
      }
      return fields[col];
    };
    auto word = lower(unquote(need(desc.word_column)));
    if (word.empty())
    {
      throw ParseError(source, line_no, "empty word");
    }

    if (desc.layout == LexiconDescriptor::Layout::wide)
    {
      auto const last = std::max(desc.word_column,
                                 *std::max_element(desc.score_columns.begin(), desc.score_columns.end()));
      if (static_cast<int>(fields.size()) != last + 1)
      {
        throw ParseError(source, line_no,
                         "width mismatch: expected " + std::to_string(last + 1) + " columns, got " +
                             std::to_string(fields.size()));
      }
      Eigen::VectorXd v(width);
      for (int c = 0; c < width; ++c)
      {
        auto value = to_double(need(desc.score_columns[c]));
        if (!value)
        {
          throw ParseError(source, line_no,
                           "non-numeric score '" + std::string(fields[desc.score_columns[c]]) + "'");
        }
        check_range(line_no, c, *value);
        v[c] = *value;
      }
      entries.try_emplace(std::move(word), std::move(v));
    }
    else
    {
      auto category = unquote(need(desc.category_column));
      auto it       = std::find(desc.categories.begin(), desc.categories.end(), category);
      if (it == desc.categories.end())
      {
        throw ParseError(source, line_no, "unknown category '" + std::string(category) + "'");
      }
      auto const col   = static_cast<int>(it - desc.categories.begin());
      auto       value = to_double(need(desc.value_column));
      if (!value)
      {
        throw ParseError(source, line_no,
                         "non-numeric score '" + std::string(fields[desc.value_column]) + "'");
      }
      check_range(line_no, col, *value);
      auto [eit, fresh] = entries.try_emplace(word, Eigen::VectorXd::Zero(width));
      auto &mask        = filled[word];
      if (mask.empty())
      {
        mask.assign(width, false);
      }
      if (!mask[col])
      {
        eit->second[col] = *value;
        mask[col]        = true;
      }
    }
  }

  if (entries.empty())
  {
    throw ParseError(source, line_no, "lexicon has no entries");
  }
  return Lexicon(schema, std::move(entries));
}

Eigen::VectorXd word_scores(Lexicon const &lex, std::string_view word)
{
  if (auto const *v = lex.find(word))
  {
    return *v;
  }
  return Eigen::VectorXd::Zero(lex.width());
}

Eigen::VectorXd tweet_lexicon_vector(Lexicon const &lex, std::span<std::string const> tokens)
{
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(lex.width());
  if (tokens.empty())
  {
    return sum;
  }
  for (auto const &tok : tokens)
  {
    if (auto const *v = lex.find(tok))
    {
      sum += *v;
    }
  }
  return sum / static_cast<double>(tokens.size());
}

Eigen::VectorXd combined_vector(std::span<Lexicon const *const> lexicons,
                                std::span<std::string const> tokens)
{
  if (lexicons.size() != kCombinedOrder.size())
  {
    throw ValidationError("combined vector needs exactly 5 lexicons, got " +
                          std::to_string(lexicons.size()));
  }
  int total = 0;
  for (std::size_t i = 0; i < lexicons.size(); ++i)
  {
    if (lexicons[i] == nullptr || lexicons[i]->schema().name != kCombinedOrder[i])
    {
      throw ValidationError("combined vector expects lexicons in order VAD, EMOLEX, AI, ANEW, Warriner");
    }
    total += lexicons[i]->width();
  }
  Eigen::VectorXd out(total);
  int             offset = 0;
  for (auto const *lex : lexicons)
  {
    out.segment(offset, lex->width()) = tweet_lexicon_vector(*lex, tokens);
    offset += lex->width();
  }
  return out;
}

void LexiconSet::add(Lexicon lex)
{
  auto name = lex.schema().name;
  if (name == LexiconName::Combined)
  {
    throw ValidationError("the combined lexicon is derived, not loaded");
  }
  slots_[static_cast<std::size_t>(name)].emplace(std::move(lex));
}

bool LexiconSet::has(LexiconName name) const
{
  if (name == LexiconName::Combined)
  {
    return std::all_of(slots_.begin(), slots_.end(), [](auto const &s) { return s.has_value(); });
  }
  return slots_[static_cast<std::size_t>(name)].has_value();
}

Lexicon const &LexiconSet::get(LexiconName name) const
{
  if (name == LexiconName::Combined || !slots_[static_cast<std::size_t>(name)])
  {
    throw LookupError("lexicon " + std::string(to_string(name)) + " not loaded");
  }
  return *slots_[static_cast<std::size_t>(name)];
}

int LexiconSet::width(LexiconName name) const
{
  if (name == LexiconName::Combined)
  {
    int total = 0;
    for (auto part : kCombinedOrder)
    {
      total += get(part).width();
    }
    return total;
  }
  return get(name).width();
}

Eigen::VectorXd LexiconSet::tweet_vector(LexiconName name, std::span<std::string const> tokens) const
{
  if (name != LexiconName::Combined)
  {
    return tweet_lexicon_vector(get(name), tokens);
  }
  std::array<Lexicon const *, 5> parts{};
  for (std::size_t i = 0; i < parts.size(); ++i)
  {
    parts[i] = &get(kCombinedOrder[i]);
  }
  return combined_vector(parts, tokens);
}

}  // namespace emoknn
