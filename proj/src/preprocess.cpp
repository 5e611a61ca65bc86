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
#include "emoknn/preprocess.hpp"

#include "emoknn/error.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>

namespace emoknn {

namespace {

bool is_ascii_alnum(unsigned char c) noexcept
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_ascii_space(unsigned char c) noexcept
{
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

char ascii_lower(char c) noexcept
{
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

struct Decoded
{
  char32_t    cp;
  std::size_t len;
};

// Decodes one code point; nullopt on a malformed sequence.
std::optional<Decoded> decode(std::string_view s, std::size_t i) noexcept
{
  auto const b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80)
  {
    return Decoded{b0, 1};
  }
  std::size_t len;
  char32_t    cp;
  char32_t    min;
  if ((b0 & 0xE0) == 0xC0)
  {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  }
  else if ((b0 & 0xF0) == 0xE0)
  {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  }
  else if ((b0 & 0xF8) == 0xF0)
  {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  }
  else
  {
    return std::nullopt;
  }
  if (i + len > s.size())
  {
    return std::nullopt;
  }
  for (std::size_t k = 1; k < len; ++k)
  {
    auto const b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80)
    {
      return std::nullopt;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
  {
    return std::nullopt;
  }
  return Decoded{cp, len};
}

bool is_unicode_space(char32_t cp) noexcept
{
  return cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0x0085;
}

// Non-ASCII code points treated as punctuation, digits or invisible formatting.
bool is_unicode_deletable(char32_t cp) noexcept
{
  return (cp >= 0x0080 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x2010 && cp <= 0x206F) || (cp >= 0x200B && cp <= 0x200F) ||
         (cp >= 0x20A0 && cp <= 0x20CF) || (cp >= 0x3001 && cp <= 0x303F) ||
         (cp >= 0xFE00 && cp <= 0xFE0F) || (cp >= 0xFE30 && cp <= 0xFE6F) ||
         (cp >= 0xFF01 && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65) || cp == 0xFEFF || (cp >= 0xE0000 && cp <= 0xE007F);
}

// Letters and non-ASCII characters that cleaning keeps; everything else separates words.
bool survives_cleaning(std::string_view text, std::size_t at) noexcept
{
  auto const b = static_cast<unsigned char>(text[at]);
  if (b < 0x80)
  {
    return (b >= 'a' && b <= 'z') || (b >= 'A' && b <= 'Z');
  }
  auto d = decode(text, at);
  return d && !is_unicode_space(d->cp) && !is_unicode_deletable(d->cp);
}

std::vector<std::pair<std::string, std::string>> read_table(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw LookupError("cannot open " + path.string());
  }
  std::vector<std::pair<std::string, std::string>> entries;
  std::string                                      line;
  std::size_t                                      line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
    {
      line.pop_back();
    }
    if (line.empty() || line.starts_with("#\t"))
    {
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
    {
      throw ParseError(path.string(), line_no, "expected `key<TAB>description`");
    }
    entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return entries;
}

}  // namespace

bool is_valid_utf8(std::string_view text) noexcept
{
  for (std::size_t i = 0; i < text.size();)
  {
    auto d = decode(text, i);
    if (!d)
    {
      return false;
    }
    i += d->len;
  }
  return true;
}

void CleaningConfig::validate() const
{
  if (remove_stopwords && !general)
  {
    throw ValidationError("stop-word removal requires general preprocessing");
  }
}

std::string CleaningConfig::name() const
{
  std::string out = !general ? "raw" : (remove_stopwords ? "general+stopwords" : "general");
  if (lowercase)
  {
    out += "+lower";
  }
  return out;
}

CleaningConfig CleaningConfig::parse(std::string_view name)
{
  CleaningConfig cfg;
  if (name.ends_with("+lower"))
  {
    cfg.lowercase = true;
    name.remove_suffix(6);
  }
  if (name == "raw")
  {
  }
  else if (name == "general")
  {
    cfg.general = true;
  }
  else if (name == "general+stopwords")
  {
    cfg.general          = true;
    cfg.remove_stopwords = true;
  }
  else
  {
    throw ValidationError("unknown cleaning variant '" + std::string(name) + "'");
  }
  return cfg;
}

ReplacementTable::ReplacementTable(std::vector<std::pair<std::string, std::string>> entries)
{
  std::map<std::string, std::string> uniq;
  for (auto &[key, desc] : entries)
  {
    if (key.empty())
    {
      throw ValidationError("replacement table key must be non-empty");
    }
    uniq.emplace(std::move(key), std::move(desc));  // first occurrence wins
  }
  entries_.assign(std::make_move_iterator(uniq.begin()), std::make_move_iterator(uniq.end()));
  std::stable_sort(entries_.begin(), entries_.end(), [](auto const &a, auto const &b) {
    return a.first.size() > b.first.size();
  });
  max_key_len_ = entries_.empty() ? 0 : entries_.front().first.size();
}

ReplacementTable ReplacementTable::load(std::filesystem::path const &path)
{
  return ReplacementTable(read_table(path));
}

std::string ReplacementTable::apply(std::string_view text) const
{
  if (entries_.empty())
  {
    return std::string(text);
  }

  // Distinct key lengths (descending) and a hash lookup per length keep this linear in
  // the text for large emoji tables.
  std::vector<std::size_t> lengths;
  for (auto const &e : entries_)
  {
    if (lengths.empty() || lengths.back() != e.first.size())
    {
      lengths.push_back(e.first.size());
    }
  }

  auto find = [this](std::string_view key) -> std::pair<std::string, std::string> const * {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key, [](auto const &e, std::string_view k) {
      if (e.first.size() != k.size())
      {
        return e.first.size() > k.size();
      }
      return std::string_view(e.first) < k;
    });
    return (it != entries_.end() && it->first == key) ? &*it : nullptr;
  };

  std::string out;
  out.reserve(text.size() + 16);
  std::size_t i = 0;
  while (i < text.size())
  {
    bool matched = false;
    for (auto len : lengths)
    {
      if (i + len > text.size())
      {
        continue;
      }
      auto candidate = text.substr(i, len);
      auto entry     = find(candidate);
      if (!entry)
      {
        continue;
      }
      bool const word_like = std::all_of(candidate.begin(), candidate.end(),
                                         [](char c) { return is_ascii_alnum(static_cast<unsigned char>(c)); });
      if (word_like)
      {
        std::size_t prev = i == 0 ? 0 : i - 1;
        while (prev > 0 && (static_cast<unsigned char>(text[prev]) & 0xC0) == 0x80)
        {
          --prev;
        }
        bool const left_ok  = i == 0 || !survives_cleaning(text, prev);
        bool const right_ok = i + len == text.size() || !survives_cleaning(text, i + len);
        if (!left_ok || !right_ok)
        {
          continue;
        }
      }
      out += ' ';
      out += entry->second;
      out += ' ';
      i += len;
      matched = true;
      break;
    }
    if (!matched)
    {
      out += text[i];
      ++i;
    }
  }
  return out;
}

EmojiTable::EmojiTable(std::vector<std::pair<std::string, std::string>> entries)
{
  for (auto const &[key, desc] : entries)
  {
    if (!is_valid_utf8(key))
    {
      throw ValidationError("emoji key is not valid UTF-8");
    }
    if (!std::all_of(desc.begin(), desc.end(), [](char c) {
          return c == ' ' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
        }))
    {
      throw ValidationError("emoji description '" + desc + "' must contain only letters and spaces");
    }
  }
  static_cast<ReplacementTable &>(*this) = ReplacementTable(std::move(entries));
}

EmojiTable EmojiTable::load(std::filesystem::path const &path)
{
  return EmojiTable(read_table(path));
}

StopwordList::StopwordList(std::vector<std::string> words)
{
  for (auto const &w : words)
  {
    if (!w.empty())
    {
      words_.insert(lower(w));
    }
  }
}

StopwordList StopwordList::load(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw LookupError("cannot open " + path.string());
  }
  std::vector<std::string> words;
  std::string              line;
  while (std::getline(in, line))
  {
    auto tokens = tokenize(line);
    words.insert(words.end(), tokens.begin(), tokens.end());
  }
  return StopwordList(std::move(words));
}

bool StopwordList::contains(std::string_view word) const
{
  return words_.contains(lower(word));
}

std::vector<std::string> tokenize(std::string_view text)
{
  std::vector<std::string> tokens;
  std::size_t              i = 0;
  while (i < text.size())
  {
    while (i < text.size() && is_ascii_space(static_cast<unsigned char>(text[i])))
    {
      ++i;
    }
    auto start = i;
    while (i < text.size() && !is_ascii_space(static_cast<unsigned char>(text[i])))
    {
      ++i;
    }
    if (i > start)
    {
      tokens.emplace_back(text.substr(start, i - start));
    }
  }
  return tokens;
}

std::string clean(std::string_view text, CleaningConfig const &config, EmoticonTable const &emoticons,
                  EmojiTable const &emojis, StopwordList const &stopwords)
{
  config.validate();
  if (!config.general)
  {
    return std::string(text);
  }
  if (config.remove_stopwords && stopwords.empty())
  {
    throw ValidationError("stop-word removal enabled with an empty stop-word list");
  }

  // emoji and emoticon replacement must precede punctuation deletion
  std::string s = emojis.apply(text);
  s             = emoticons.apply(s);

  // drop @-tags, '&' -> " and ", drop '#', newlines -> space
  {
    std::string out;
    out.reserve(s.size());
    bool at_token_start = true;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
      char const c = s[i];
      if (at_token_start && c == '@')
      {
        while (i < s.size() && !is_ascii_space(static_cast<unsigned char>(s[i])))
        {
          ++i;
        }
        if (i < s.size())
        {
          out += s[i] == '\n' || s[i] == '\r' ? ' ' : s[i];
        }
        at_token_start = true;
        continue;
      }
      at_token_start = is_ascii_space(static_cast<unsigned char>(c));
      if (c == '&')
      {
        out += " and ";
      }
      else if (c == '#')
      {
      }
      else if (c == '\n' || c == '\r')
      {
        out += ' ';
      }
      else
      {
        out += c;
      }
    }
    s = std::move(out);
  }

  // delete punctuation and digits, optionally lowercase, collapse whitespace
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  auto emit          = [&](std::string_view piece) {
    if (pending_space && !out.empty())
    {
      out += ' ';
    }
    pending_space = false;
    out += piece;
  };
  for (std::size_t i = 0; i < s.size();)
  {
    auto const b = static_cast<unsigned char>(s[i]);
    if (b < 0x80)
    {
      if (is_ascii_space(b))
      {
        pending_space = true;
      }
      else if ((b >= 'a' && b <= 'z') || (b >= 'A' && b <= 'Z'))
      {
        char const c = config.lowercase ? ascii_lower(static_cast<char>(b)) : static_cast<char>(b);
        emit(std::string_view(&c, 1));
      }
      ++i;
      continue;
    }
    auto d = decode(s, i);
    if (!d)
    {
      ++i;
      continue;
    }
    if (is_unicode_space(d->cp))
    {
      pending_space = true;
    }
    else if (!is_unicode_deletable(d->cp))
    {
      emit(std::string_view(s).substr(i, d->len));
    }
    i += d->len;
  }

  if (!config.remove_stopwords)
  {
    return out;
  }
  std::string kept;
  for (auto const &tok : tokenize(out))
  {
    if (stopwords.contains(tok))
    {
      continue;
    }
    if (!kept.empty())
    {
      kept += ' ';
    }
    kept += tok;
  }
  return kept;
}

}  // namespace emoknn
