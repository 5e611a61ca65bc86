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
#include "emoknn/features.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace emoknn {

std::string_view to_string(EmbeddingLevel level) noexcept
{
  return level == EmbeddingLevel::sentence ? "sentence" : "token";
}

EmbeddingStore::EmbeddingStore(std::string model_name, EmbeddingLevel level, int dim)
  : model_name_(std::move(model_name))
  , level_(level)
  , dim_(dim)
{
  if (dim_ <= 0)
  {
    throw ValidationError("embedding dim must be positive");
  }
}

void EmbeddingStore::add(std::string id, Eigen::MatrixXd rows)
{
  if (rows.cols() != dim_)
  {
    throw ValidationError("embedding for " + id + " has width " + std::to_string(rows.cols()) +
                          ", store dim is " + std::to_string(dim_));
  }
  if (rows.rows() == 0)
  {
    throw ValidationError("embedding for " + id + " has no rows");
  }
  if (level_ == EmbeddingLevel::sentence && rows.rows() != 1)
  {
    throw ValidationError("sentence-level embedding for " + id + " has " +
                          std::to_string(rows.rows()) + " rows");
  }
  if (vectors_.contains(id))
  {
    throw ValidationError("duplicate embedding id " + id);
  }
  order_.push_back(id);
  vectors_.emplace(std::move(id), std::move(rows));
}

bool EmbeddingStore::contains(std::string_view id) const
{
  return vectors_.contains(std::string(id));
}

Eigen::MatrixXd const &EmbeddingStore::rows(std::string_view id) const
{
  auto it = vectors_.find(std::string(id));
  if (it == vectors_.end())
  {
    throw LookupError("no " + model_name_ + " embedding for id " + std::string(id));
  }
  return it->second;
}

Eigen::VectorXd EmbeddingStore::tweet_vector(std::string_view id) const
{
  auto const &r = rows(id);
  if (level_ == EmbeddingLevel::sentence)
  {
    return r.row(0).transpose();
  }
  return pool_tokens(r);
}

void EmbeddingStore::absorb(EmbeddingStore const &other)
{
  if (other.model_name_ != model_name_ || other.level_ != level_ || other.dim_ != dim_)
  {
    throw ValidationError("cannot merge embedding stores with different model, level or dim");
  }
  for (auto const &id : other.order_)
  {
    add(id, other.vectors_.at(id));
  }
}

namespace {

struct Header
{
  std::string    model;
  EmbeddingLevel level = EmbeddingLevel::sentence;
  int            dim   = 0;
};

Header parse_header(std::string_view line, std::string const &source)
{
  if (!line.starts_with("#"))
  {
    throw ParseError(source, 1, "missing `#model=... level=... dim=...` header");
  }
  line.remove_prefix(1);
  Header h;
  bool   have_model = false, have_level = false, have_dim = false;
  std::istringstream in{std::string(line)};
  std::string        kv;
  while (in >> kv)
  {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
    {
      throw ParseError(source, 1, "malformed header field '" + kv + "'");
    }
    auto key = kv.substr(0, eq);
    auto val = kv.substr(eq + 1);
    if (key == "model")
    {
      h.model    = val;
      have_model = true;
    }
    else if (key == "level")
    {
      if (val == "sentence")
      {
        h.level = EmbeddingLevel::sentence;
      }
      else if (val == "token")
      {
        h.level = EmbeddingLevel::token;
      }
      else
      {
        throw ParseError(source, 1, "unknown level '" + val + "'");
      }
      have_level = true;
    }
    else if (key == "dim")
    {
      auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), h.dim);
      if (ec != std::errc{} || ptr != val.data() + val.size() || h.dim <= 0)
      {
        throw ParseError(source, 1, "bad dim '" + val + "'");
      }
      have_dim = true;
    }
  }
  if (!have_model || !have_level || !have_dim || h.model.empty())
  {
    throw ParseError(source, 1, "header must declare model, level and dim");
  }
  return h;
}

}  // namespace

EmbeddingStore parse_embeddings(std::string_view contents, std::string const &source)
{
  std::size_t                 line_no = 0;
  std::size_t                 start   = 0;
  std::optional<Header>       header;
  std::optional<EmbeddingStore> store;

  std::string              current_id;
  std::vector<std::vector<double>> current_rows;

  auto flush = [&](std::size_t at_line) {
    if (current_rows.empty())
    {
      return;
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(current_rows.size()), header->dim);
    for (std::size_t r = 0; r < current_rows.size(); ++r)
    {
      m.row(static_cast<Eigen::Index>(r)) =
          Eigen::Map<Eigen::RowVectorXd const>(current_rows[r].data(), header->dim);
    }
    if (store->contains(current_id))
    {
      throw ParseError(source, at_line, "duplicate id " + current_id);
    }
    store->add(current_id, std::move(m));
    current_rows.clear();
  };

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
    if (!header)
    {
      header = parse_header(line, source);
      store.emplace(header->model, header->level, header->dim);
      continue;
    }
    if (line.empty() || line.starts_with("#"))
    {
      continue;
    }

    auto t1 = line.find('\t');
    auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos)
    {
      throw ParseError(source, line_no, "expected `id<TAB>token_index<TAB>floats`");
    }
    auto id     = line.substr(0, t1);
    auto idx_sv = line.substr(t1 + 1, t2 - t1 - 1);
    auto floats = line.substr(t2 + 1);
    if (id.empty())
    {
      throw ParseError(source, line_no, "empty id");
    }
    long token_index = -1;
    {
      auto [ptr, ec] = std::from_chars(idx_sv.data(), idx_sv.data() + idx_sv.size(), token_index);
      if (ec != std::errc{} || ptr != idx_sv.data() + idx_sv.size() || token_index < 0)
      {
        throw ParseError(source, line_no, "bad token index '" + std::string(idx_sv) + "'");
      }
    }

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(header->dim));
    std::size_t i = 0;
    while (i < floats.size())
    {
      while (i < floats.size() && floats[i] == ' ')
      {
        ++i;
      }
      if (i >= floats.size())
      {
        break;
      }
      auto   j = floats.find(' ', i);
      auto   tok = floats.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
      double v   = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size())
      {
        throw ParseError(source, line_no, "bad float '" + std::string(tok) + "'");
      }
      values.push_back(v);
      i += tok.size();
    }
    if (static_cast<int>(values.size()) != header->dim)
    {
      throw ParseError(source, line_no,
                       "dimension mismatch: " + std::to_string(values.size()) + " floats, dim=" +
                           std::to_string(header->dim));
    }

    bool const same_id = !current_rows.empty() && id == current_id;
    if (header->level == EmbeddingLevel::sentence)
    {
      if (token_index != 0)
      {
        throw ParseError(source, line_no, "sentence-level rows must use token index 0");
      }
      if (same_id)
      {
        throw ParseError(source, line_no, "duplicate id " + std::string(id));
      }
    }
    else
    {
      auto const expected = same_id ? static_cast<long>(current_rows.size()) : 0L;
      if (token_index != expected)
      {
        throw ParseError(source, line_no,
                         same_id || token_index != 0
                             ? "token index " + std::to_string(token_index) + ", expected " +
                                   std::to_string(expected)
                             : "duplicate id " + std::string(id));
      }
    }
    if (!same_id)
    {
      flush(line_no);
      current_id = std::string(id);
      if (store->contains(current_id))
      {
        throw ParseError(source, line_no, "duplicate id " + current_id);
      }
    }
    current_rows.push_back(std::move(values));
  }
  if (!header)
  {
    throw ParseError(source, 1, "empty embedding file");
  }
  flush(line_no);
  return std::move(*store);
}

EmbeddingStore load_embeddings(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw LookupError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_embeddings(ss.str(), path.string());
}

std::string format_embeddings(EmbeddingStore const &store)
{
  std::string out = "#model=" + store.model_name() + " level=" + std::string(to_string(store.level())) +
                    " dim=" + std::to_string(store.dim()) + "\n";
  char buf[64];
  for (auto const &id : store.ids())
  {
    auto const &m = store.rows(id);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
      out += id;
      out += '\t';
      out += std::to_string(r);
      out += '\t';
      for (Eigen::Index c = 0; c < m.cols(); ++c)
      {
        if (c > 0)
        {
          out += ' ';
        }
        auto res = std::to_chars(buf, buf + sizeof(buf), m(r, c));
        out.append(buf, res.ptr);
      }
      out += '\n';
    }
  }
  return out;
}

void write_embeddings(EmbeddingStore const &store, std::filesystem::path const &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw LookupError("cannot write " + path.string());
  }
  out << format_embeddings(store);
}

FeatureSpec FeatureSpec::of_embedding(std::string model)
{
  return {std::move(model), std::nullopt, FeatureMode::embedding_only};
}

FeatureSpec FeatureSpec::of_lexicon(LexiconName lex)
{
  return {std::nullopt, lex, FeatureMode::lexicon_only};
}

FeatureSpec FeatureSpec::of_appended(std::string model, LexiconName lex)
{
  return {std::move(model), lex, FeatureMode::appended};
}

void FeatureSpec::validate() const
{
  switch (mode)
  {
  case FeatureMode::embedding_only:
    if (!embedding || lexicon)
    {
      throw ValidationError("embedding_only feature needs an embedding and no lexicon");
    }
    break;
  case FeatureMode::lexicon_only:
    if (!lexicon || embedding)
    {
      throw ValidationError("lexicon_only feature needs a lexicon and no embedding");
    }
    break;
  case FeatureMode::appended:
    if (!embedding || !lexicon)
    {
      throw ValidationError("appended feature needs both an embedding and a lexicon");
    }
    break;
  }
}

std::string FeatureSpec::name() const
{
  switch (mode)
  {
  case FeatureMode::embedding_only:
    return embedding.value_or("?");
  case FeatureMode::lexicon_only:
    return lexicon ? std::string(to_string(*lexicon)) : "?";
  case FeatureMode::appended:
    return embedding.value_or("?") + "+" + (lexicon ? std::string(to_string(*lexicon)) : "?");
  }
  return "?";
}

FeatureBlocks FeatureBlocks::select(std::span<std::size_t const> rows) const
{
  FeatureBlocks out;
  out.embedding.resize(embedding.rows() ? static_cast<Eigen::Index>(rows.size()) : 0, embedding.cols());
  out.lexicon.resize(lexicon.rows() ? static_cast<Eigen::Index>(rows.size()) : 0, lexicon.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    auto const r = static_cast<Eigen::Index>(rows[i]);
    if (embedding.rows())
    {
      out.embedding.row(static_cast<Eigen::Index>(i)) = embedding.row(r);
    }
    if (lexicon.rows())
    {
      out.lexicon.row(static_cast<Eigen::Index>(i)) = lexicon.row(r);
    }
  }
  return out;
}

FeatureNormalizer FeatureNormalizer::fit(FeatureSpec const &spec, FeatureBlocks const &train)
{
  FeatureNormalizer out;
  if (spec.mode != FeatureMode::appended)
  {
    return out;
  }
  out.embedding = fit_minmax(train.embedding);
  out.lexicon   = fit_minmax(train.lexicon);
  return out;
}

Eigen::MatrixXd assemble(FeatureSpec const &spec, FeatureBlocks const &blocks, FeatureNormalizer const &normalizer)
{
  switch (spec.mode)
  {
  case FeatureMode::embedding_only:
    return blocks.embedding;
  case FeatureMode::lexicon_only:
    return blocks.lexicon;
  case FeatureMode::appended:
  {
    if (!normalizer.embedding || !normalizer.lexicon)
    {
      throw ValidationError("appended features need fitted min-max parameters");
    }
    if (blocks.embedding.rows() != blocks.lexicon.rows())
    {
      throw ValidationError("embedding and lexicon blocks differ in row count");
    }
    Eigen::MatrixXd out(blocks.embedding.rows(), blocks.embedding.cols() + blocks.lexicon.cols());
    out.leftCols(blocks.embedding.cols())  = apply_minmax_rows(blocks.embedding, *normalizer.embedding);
    out.rightCols(blocks.lexicon.cols())   = apply_minmax_rows(blocks.lexicon, *normalizer.lexicon);
    return out;
  }
  }
  throw ValidationError("unknown feature mode");
}

FeatureBlocks raw_blocks(FeatureSpec const &spec, std::span<std::string const> ids,
                         std::span<std::vector<std::string> const> tokens, FeatureSources const &sources,
                         std::vector<std::string> *warnings)
{
  spec.validate();
  if (ids.size() != tokens.size())
  {
    throw ValidationError("ids and token lists differ in length");
  }
  auto const    n = static_cast<Eigen::Index>(ids.size());
  FeatureBlocks out;
  if (spec.embedding)
  {
    auto const *store = sources.store;
    if (store == nullptr)
    {
      throw LookupError("embedding store '" + *spec.embedding + "' not loaded");
    }
    out.embedding.resize(n, store->dim());
    for (Eigen::Index i = 0; i < n; ++i)
    {
      auto const &id = ids[static_cast<std::size_t>(i)];
      if (!store->contains(id) && store->level() == EmbeddingLevel::token)
      {
        out.embedding.row(i).setZero();
        if (warnings)
        {
          warnings->push_back("no in-vocabulary tokens for " + id + " in " + store->model_name() +
                              ", using the zero vector");
        }
        continue;
      }
      out.embedding.row(i) = store->tweet_vector(id).transpose();
    }
  }
  if (spec.lexicon)
  {
    if (sources.lexicons == nullptr || !sources.lexicons->has(*spec.lexicon))
    {
      throw LookupError("lexicon " + std::string(to_string(*spec.lexicon)) + " not loaded");
    }
    out.lexicon.resize(n, sources.lexicons->width(*spec.lexicon));
    for (Eigen::Index i = 0; i < n; ++i)
    {
      out.lexicon.row(i) =
          sources.lexicons->tweet_vector(*spec.lexicon, tokens[static_cast<std::size_t>(i)]).transpose();
    }
  }
  return out;
}

Eigen::VectorXd compose(std::string const &id, FeatureSpec const &spec, FeatureSources const &sources,
                        std::vector<std::string> const &tokens, FeatureNormalizer const &normalizer,
                        std::vector<std::string> *warnings)
{
  auto blocks = raw_blocks(spec, std::span<std::string const>(&id, 1),
                           std::span<std::vector<std::string> const>(&tokens, 1), sources, warnings);
  return assemble(spec, blocks, normalizer).row(0).transpose();
}

}  // namespace emoknn
