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
#include "doctest.h"

#include "emoknn/error.hpp"
#include "emoknn/lexicon.hpp"
#include "support.hpp"

using namespace emoknn;
using namespace emoknn::testing;

namespace {

Lexicon vad_fixture()
{
  std::unordered_map<std::string, Eigen::VectorXd> entries;
  entries.emplace("w1", Eigen::Vector3d(1, 0, 0));
  entries.emplace("w2", Eigen::Vector3d(0, 1, 0));
  return Lexicon(LexiconSchema::standard(LexiconName::VAD), std::move(entries));
}

Lexicon filled(LexiconName name, double value)
{
  auto                                             schema = LexiconSchema::standard(name);
  std::unordered_map<std::string, Eigen::VectorXd> entries;
  entries.emplace("word", Eigen::VectorXd::Constant(schema.width, value));
  return Lexicon(schema, std::move(entries));
}

}  // namespace

TEST_CASE("standard schema widths")
{
  CHECK(LexiconSchema::standard(LexiconName::VAD).width == 3);
  CHECK(LexiconSchema::standard(LexiconName::EMOLEX).width == 10);
  CHECK(LexiconSchema::standard(LexiconName::AI).width == 4);
  CHECK(LexiconSchema::standard(LexiconName::ANEW).width == 6);
  CHECK(LexiconSchema::standard(LexiconName::Warriner).width == 63);
  CHECK(LexiconSchema::standard(LexiconName::Combined).width == 86);
}

TEST_CASE("wide layout file loads")
{
  TempDir dir;
  write_file(dir / "vad.txt", "Word Valence Arousal Dominance\nabduction 0.225 0.565 0.262\nAbduction 0.9 0.9 0.9\n");
  write_file(dir / "vad.txt.json", R"({"delimiter": "whitespace", "header_lines": 1, "score_columns": [1, 2, 3]})");
  auto const lex = load_lexicon(dir / "vad.txt", LexiconSchema::standard(LexiconName::VAD));
  REQUIRE(lex.size() == 1);
  auto const *v = lex.find("ABDUCTION");
  REQUIRE(v != nullptr);
  CHECK(v->size() == 3);
  CHECK((*v)[0] == 0.225);
  CHECK((*v)[2] == 0.262);
}

TEST_CASE("long layout file loads")
{
  TempDir dir;
  write_file(dir / "ai.txt", "happy\tjoy\t0.8\nhappy\tanger\t0.1\nscared\tfear\t0.9\n");
  auto desc       = LexiconDescriptor::parse(R"({"layout": "long", "categories": ["anger", "fear", "joy", "sadness"]})");
  auto const lex  = load_lexicon(dir / "ai.txt", LexiconSchema::standard(LexiconName::AI), desc);
  auto const *v   = lex.find("happy");
  REQUIRE(v != nullptr);
  CHECK(*v == Eigen::Vector4d(0.1, 0, 0.8, 0));
  CHECK(*lex.find("scared") == Eigen::Vector4d(0, 0.9, 0, 0));
}

TEST_CASE("lexicon load errors")
{
  TempDir    dir;
  auto const schema = LexiconSchema::standard(LexiconName::VAD);
  auto const desc   = LexiconDescriptor::parse(R"({"delimiter": "\t", "score_columns": [1, 2, 3]})");
  write_file(dir / "empty.txt", "");
  CHECK_THROWS_AS(load_lexicon(dir / "empty.txt", schema, desc), ParseError);

  write_file(dir / "short.txt", "a\t0.1\t0.2\t0.3\nb\t0.1\t0.2\n");
  try
  {
    load_lexicon(dir / "short.txt", schema, desc);
    FAIL("expected a parse error");
  }
  catch (ParseError const &e)
  {
    CHECK(e.line() == 2);
  }
  write_file(dir / "nan.txt", "a\t0.1\tzero\t0.3\n");
  CHECK_THROWS_AS(load_lexicon(dir / "nan.txt", schema, desc), ParseError);
  write_file(dir / "range.txt", "a\t0.1\t7\t0.3\n");
  CHECK_THROWS_AS(load_lexicon(dir / "range.txt", schema, desc), ParseError);

  auto const narrow = LexiconDescriptor::parse(R"({"score_columns": [1, 2]})");
  CHECK_THROWS_AS(load_lexicon(dir / "short.txt", schema, narrow), ValidationError);
}

TEST_CASE("word scores and tweet vectors")
{
  auto const lex = vad_fixture();
  CHECK(word_scores(lex, "absent") == Eigen::Vector3d::Zero());
  CHECK(word_scores(lex, "W1") == Eigen::Vector3d(1, 0, 0));

  std::vector<std::string> two{"w1", "w2"};
  CHECK(tweet_lexicon_vector(lex, two) == Eigen::Vector3d(0.5, 0.5, 0));
  CHECK(tweet_lexicon_vector(lex, {}) == Eigen::Vector3d::Zero());

  std::vector<std::string> three{"x", "w2", "y"};
  auto const               v = tweet_lexicon_vector(lex, three);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(v[2] == 0.0);
}

TEST_CASE("combined vector")
{
  std::vector<Lexicon> lexicons;
  double               value = 0.1;
  for (auto name : kCombinedOrder)
  {
    lexicons.push_back(filled(name, value));
    value += 0.1;
  }
  std::vector<Lexicon const *> ptrs;
  for (auto const &l : lexicons)
  {
    ptrs.push_back(&l);
  }
  std::vector<std::string> tokens{"word", "other"};
  auto const               v = combined_vector(ptrs, tokens);
  REQUIRE(v.size() == 86);
  CHECK(v[0] == doctest::Approx(0.05));
  CHECK(v[3] == doctest::Approx(0.1));
  CHECK(v[85] == doctest::Approx(0.25));
  CHECK(combined_vector(ptrs, {}) == Eigen::VectorXd::Zero(86));

  std::swap(ptrs[0], ptrs[1]);
  CHECK_THROWS_AS(combined_vector(ptrs, tokens), ValidationError);
  ptrs.pop_back();
  CHECK_THROWS_AS(combined_vector(ptrs, tokens), ValidationError);

  LexiconSet set;
  for (auto &l : lexicons)
  {
    set.add(std::move(l));
  }
  CHECK(set.width(LexiconName::Combined) == 86);
  CHECK(set.tweet_vector(LexiconName::Combined, tokens).size() == 86);
  CHECK(set.tweet_vector(LexiconName::ANEW, tokens).size() == 6);

  LexiconSet partial;
  partial.add(vad_fixture());
  CHECK_THROWS_AS(partial.tweet_vector(LexiconName::Combined, tokens), LookupError);
  CHECK_THROWS_AS(partial.get(LexiconName::AI), LookupError);
}
