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

#include "emoknn/data_model.hpp"
#include "emoknn/error.hpp"
#include "support.hpp"

using namespace emoknn;
using namespace emoknn::testing;

TEST_CASE("parse a single labelled row")
{
  auto const ds = parse_dataset_text(
      kHeader + "2018-En-01\tI'm offended. Prick.\tanger\t2: moderate amount of anger can be inferred\n", Split::train);
  REQUIRE(ds.size() == 1);
  CHECK(ds.emotion() == Emotion::anger);
  CHECK(ds[0].id == "2018-En-01");
  CHECK(ds[0].text == "I'm offended. Prick.");
  REQUIRE(ds[0].label);
  CHECK(ds[0].label->value() == 2);
}

TEST_CASE("header-only file gives an empty dataset")
{
  auto const ds = parse_dataset_text(kHeader, Split::dev, Emotion::joy);
  CHECK(ds.empty());
  CHECK(ds.emotion() == Emotion::joy);
}

TEST_CASE("NONE label is allowed in the test split only")
{
  auto const row = kHeader + "2018-En-09\tsome text\tfear\tNONE\n";
  auto const ds  = parse_dataset_text(row, Split::test);
  REQUIRE(ds.size() == 1);
  CHECK_FALSE(ds[0].label);
  CHECK_THROWS_AS(parse_dataset_text(row, Split::train), ParseError);
}

TEST_CASE("malformed rows report the line number")
{
  auto const text = kHeader + ei_row("a", "x", 1) + "b\tonly two\n";
  try
  {
    parse_dataset_text(text, Split::train);
    FAIL("expected a parse error");
  }
  catch (ParseError const &e)
  {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_dataset_text(kHeader + "a\tx\tanger\tseven: lots\n", Split::train), ParseError);
  CHECK_THROWS_AS(parse_dataset_text(kHeader + "a\tx\tanger\t5: lots\n", Split::train), Error);
}

TEST_CASE("duplicate ids and mixed emotions are rejected")
{
  CHECK_THROWS_AS(parse_dataset_text(kHeader + ei_row("a", "x", 1) + ei_row("a", "y", 2), Split::train),
                  ValidationError);
  CHECK_THROWS_AS(parse_dataset_text(kHeader + ei_row("a", "x", 1) + ei_row("b", "y", 2, "joy"), Split::train),
                  Error);
}

TEST_CASE("parse from a file")
{
  TempDir dir;
  write_file(dir / "anger.txt", kHeader + ei_row("a", "x", 0) + ei_row("b", "y", 3));
  auto const ds = parse_dataset(dir / "anger.txt", Split::train);
  CHECK(ds.size() == 2);
  CHECK(ds.gold() == std::vector<double>{0.0, 3.0});
  CHECK_THROWS_AS(parse_dataset(dir / "missing.txt", Split::train), Error);
}

TEST_CASE("merge appends dev after train")
{
  std::string train = kHeader;
  std::string dev   = kHeader;
  for (int i = 0; i < 17; ++i)
  {
    train += ei_row("t" + std::to_string(i), "x", i % 4);
  }
  for (int i = 0; i < 4; ++i)
  {
    dev += ei_row("d" + std::to_string(i), "x", i % 4);
  }
  auto const merged = merge(parse_dataset_text(train, Split::train), parse_dataset_text(dev, Split::dev));
  CHECK(merged.size() == 21);
  CHECK(merged[0].id == "t0");
  CHECK(merged[17].id == "d0");
  CHECK(merged.split() == Split::merged);

  auto const empty = merge(Dataset(Emotion::fear, Split::train, {}), Dataset(Emotion::fear, Split::dev, {}));
  CHECK(empty.empty());
  CHECK_THROWS_AS(merge(Dataset(Emotion::fear, Split::train, {}), Dataset(Emotion::joy, Split::dev, {})),
                  ValidationError);
}

TEST_CASE("emotion class bounds and description")
{
  CHECK_THROWS_AS(EmotionClass(4), ValidationError);
  CHECK_THROWS_AS(EmotionClass(-1), ValidationError);
  CHECK(describe(EmotionClass(2), Emotion::anger) == "2: moderate amount of anger can be inferred");
  CHECK(describe(EmotionClass(0), Emotion::joy) == "0: no joy can be inferred");
  CHECK(parse_emotion("sadness") == Emotion::sadness);
  CHECK_THROWS(parse_emotion("disgust"));
}

TEST_CASE("prediction file follows the template")
{
  auto const templ = parse_dataset_text(kHeader + "t1\tI'm offended.\tanger\tNONE\n" + "t2\tfine\tanger\tNONE\n",
                                        Split::test);
  std::vector<PredictionRecord> records{{"t2", 0.2, EmotionClass(0)}, {"t1", 2.4, EmotionClass(2)}};
  auto const                    out = format_predictions(records, templ);
  CHECK(out == kHeader + "t1\tI'm offended.\tanger\t2: moderate amount of anger can be inferred\n" +
                   "t2\tfine\tanger\t0: no anger can be inferred\n");

  auto const empty = Dataset(Emotion::anger, Split::test, {});
  CHECK(format_predictions({}, empty) == kHeader);

  std::vector<PredictionRecord> extra{{"t1", 2.4, EmotionClass(2)}, {"t2", 0.2, EmotionClass(0)},
                                      {"zz", 1.0, EmotionClass(1)}};
  try
  {
    format_predictions(extra, templ);
    FAIL("expected a validation error");
  }
  catch (ValidationError const &e)
  {
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
  std::vector<PredictionRecord> missing{{"t1", 2.4, EmotionClass(2)}};
  CHECK_THROWS_AS(format_predictions(missing, templ), ValidationError);
}
