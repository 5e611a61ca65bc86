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

#include "emoknn/error.hpp"
#include "emoknn/lexicon.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emoknn {

enum class EmbeddingLevel
{
  sentence,
  token
};

std::string_view to_string(EmbeddingLevel level) noexcept;

/// Precomputed tweet representations keyed by instance id.
///
/// Sentence-level stores hold one row per id, token-level stores one row per token; either way
/// an entry is a (rows x dim) matrix.
class EmbeddingStore
{
public:
  EmbeddingStore(std::string model_name, EmbeddingLevel level, int dim);

  std::string const &model_name() const noexcept
  {
    return model_name_;
  }
  EmbeddingLevel level() const noexcept
  {
    return level_;
  }
  int dim() const noexcept
  {
    return dim_;
  }
  std::size_t size() const noexcept
  {
    return order_.size();
  }
  /// Ids in insertion order.
  std::vector<std::string> const &ids() const noexcept
  {
    return order_;
  }

  /// Throws ValidationError on a width mismatch, an empty token list or a duplicate id.
  void add(std::string id, Eigen::MatrixXd rows);

  bool contains(std::string_view id) const;

  /// Raw rows; throws LookupError for an unknown id.
  Eigen::MatrixXd const &rows(std::string_view id) const;

  /// The tweet vector: the stored row (sentence level) or the mean of token rows.
  Eigen::VectorXd tweet_vector(std::string_view id) const;

  /// Adds every entry of `other`; model, level and dim must agree.
  void absorb(EmbeddingStore const &other);

private:
  std::string                                      model_name_;
  EmbeddingLevel                                   level_;
  int                                              dim_;
  std::vector<std::string>                         order_;
  std::unordered_map<std::string, Eigen::MatrixXd> vectors_;
};

/// Interchange format:
///
///   #model=<name> level=<sentence|token> dim=<d>
///   # optional comment lines
///   <id>\t<token_index>\t<f1> <f2> ... <fd>
///
/// Token rows of one id are contiguous with token_index 0, 1, 2, ...; sentence rows use
/// token_index 0.
EmbeddingStore load_embeddings(std::filesystem::path const &path);
EmbeddingStore parse_embeddings(std::string_view contents, std::string const &source = "<memory>");

/// Writes in the interchange format with round-trip exact floats.
std::string format_embeddings(EmbeddingStore const &store);
void        write_embeddings(EmbeddingStore const &store, std::filesystem::path const &path);

/// Component-wise mean of the rows of `vectors`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> pool_tokens(Eigen::MatrixBase<Derived> const &vectors)
{
  if (vectors.rows() == 0)
  {
    throw DegenerateError("cannot pool an empty token list");
  }
  return vectors.colwise().mean().transpose();
}

/// Per-dimension bounds fitted on training vectors.
template <typename Scalar>
struct MinMaxParams
{
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> min;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> max;

  Eigen::Index width() const noexcept
  {
    return min.size();
  }
};

using MinMaxParamsd = MinMaxParams<double>;

/// Column-wise min and max of `train` (one vector per row).
template <typename Derived>
MinMaxParams<typename Derived::Scalar> fit_minmax(Eigen::MatrixBase<Derived> const &train)
{
  if (train.rows() == 0)
  {
    throw DegenerateError("cannot fit min-max on zero vectors");
  }
  return {train.colwise().minCoeff().transpose(), train.colwise().maxCoeff().transpose()};
}

/// (v - min) / (max - min) clamped to [0, 1]; constant dimensions map to 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
apply_minmax(Eigen::MatrixBase<Derived> const &v, MinMaxParams<typename Derived::Scalar> const &p)
{
  using Scalar = typename Derived::Scalar;
  if (v.size() != p.width())
  {
    throw ValidationError("min-max width mismatch: " + std::to_string(v.size()) + " vs " +
                          std::to_string(p.width()));
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
  {
    Scalar const span = p.max[i] - p.min[i];
    out[i]            = span > Scalar(0) ? std::clamp((v[i] - p.min[i]) / span, Scalar(0), Scalar(1)) : Scalar(0);
  }
  return out;
}

/// Row-wise apply_minmax over a matrix of vectors.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
apply_minmax_rows(Eigen::MatrixBase<Derived> const &rows, MinMaxParams<typename Derived::Scalar> const &p)
{
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(rows.rows(), rows.cols());
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
  {
    out.row(r) = apply_minmax(rows.row(r).transpose(), p).transpose();
  }
  return out;
}

enum class FeatureMode
{
  embedding_only,
  lexicon_only,
  appended
};

/// What a model sees: an embedding, a lexicon vector or both appended.
struct FeatureSpec
{
  std::optional<std::string> embedding;
  std::optional<LexiconName> lexicon;
  FeatureMode                mode = FeatureMode::embedding_only;

  static FeatureSpec of_embedding(std::string model);
  static FeatureSpec of_lexicon(LexiconName lex);
  static FeatureSpec of_appended(std::string model, LexiconName lex);

  /// Throws ValidationError unless the fields agree with the mode.
  void validate() const;

  /// "roberta", "AI" or "roberta+AI".
  std::string name() const;
};

/// Raw (unnormalized) embedding and lexicon halves of a set of instances, one row per instance.
/// A half is empty (0 columns) when the spec does not use it.
struct FeatureBlocks
{
  Eigen::MatrixXd embedding;
  Eigen::MatrixXd lexicon;

  Eigen::Index rows() const noexcept
  {
    return std::max(embedding.rows(), lexicon.rows());
  }

  FeatureBlocks select(std::span<std::size_t const> rows) const;
};

/// Per-block min-max parameters; only populated in appended mode.
struct FeatureNormalizer
{
  std::optional<MinMaxParamsd> embedding;
  std::optional<MinMaxParamsd> lexicon;

  /// Fits on the training rows of `blocks` (appended mode only; otherwise a no-op).
  static FeatureNormalizer fit(FeatureSpec const &spec, FeatureBlocks const &train);
};

/// Assembles final feature rows: raw block for single-source modes, normalized concatenation
/// for appended mode.
Eigen::MatrixXd assemble(FeatureSpec const &spec, FeatureBlocks const &blocks,
                         FeatureNormalizer const &normalizer);

/// Sources a spec draws from. `store` may be null for lexicon_only, `lexicons` for embedding_only.
struct FeatureSources
{
  EmbeddingStore const *store    = nullptr;
  LexiconSet const     *lexicons = nullptr;
};

/// Raw blocks for instances given by id and cleaned tokens.
///
/// Token-level stores omit tweets whose tokens were all out of vocabulary; such ids get the zero
/// vector and a line in `warnings`. An id missing from a sentence-level store is a LookupError.
FeatureBlocks raw_blocks(FeatureSpec const &spec, std::span<std::string const> ids,
                         std::span<std::vector<std::string> const> tokens, FeatureSources const &sources,
                         std::vector<std::string> *warnings = nullptr);

/// Single-instance feature vector (raw_blocks + assemble for one row).
Eigen::VectorXd compose(std::string const &id, FeatureSpec const &spec, FeatureSources const &sources,
                        std::vector<std::string> const &tokens, FeatureNormalizer const &normalizer,
                        std::vector<std::string> *warnings = nullptr);

}  // namespace emoknn
