// Copyright 2026 The OVC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ovc/text_classifier.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "ovc/error.hpp"
#include "test_util.hpp"

namespace ovc {
namespace {

using testing::KahanMean;
using testing::RandomVector;

TEST(PromptTest, DefaultTemplateExamples) {
  const PromptTemplate t;
  EXPECT_EQ(t.Render("dalmatian"), "What does a dalmatian look like?");
  EXPECT_EQ(t.Render("avocado"), "What does an avocado look like?");
  EXPECT_EQ(t.Render("x-ray tube"), "What does an x-ray tube look like?");
}

TEST(PromptTest, ArticleHeuristic) {
  EXPECT_EQ(IndefiniteArticle("hour hand"), "an");
  EXPECT_EQ(IndefiniteArticle("honey"), "a");
  EXPECT_EQ(IndefiniteArticle("unicycle"), "a");
  EXPECT_EQ(IndefiniteArticle("umbrella"), "an");
  EXPECT_EQ(IndefiniteArticle("one-piece"), "a");
  EXPECT_EQ(IndefiniteArticle("European robin"), "a");
  EXPECT_EQ(IndefiniteArticle("f-16"), "an");
  EXPECT_EQ(IndefiniteArticle("b-52"), "a");
  EXPECT_EQ(IndefiniteArticle("Elephant"), "an");
}

TEST(PromptTest, CustomTemplate) {
  const PromptTemplate t("Describe a(n) {class name}.");
  EXPECT_EQ(t.Render("owl"), "Describe an owl.");
  EXPECT_EQ(PromptTemplate("{class name} photo").Render("cat"), "cat photo");
}

TEST(PromptTest, Errors) {
  EXPECT_THROW(PromptTemplate().Render(""), ParameterError);
  EXPECT_THROW(PromptTemplate("no slot"), ConfigError);
  EXPECT_THROW(PromptTemplate("{class name} and {class name}"), ConfigError);
}

TEST(DescriptionsTest, GroupsPerClassAndKeepsDuplicates) {
  const std::string text =
      R"({"class": "walrus", "text": "a large tusked sea mammal", "embedding": [1, 0]})" "\n"
      R"({"class": "walrus", "text": "a large tusked sea mammal", "embedding": [0, 1]})" "\n"
      R"({"class": "walrus", "text": "whiskers", "embedding": null})" "\n"
      R"({"class": "heron", "text": "long legs", "embedding": [2, 2]})" "\n";
  const auto sets = ParseDescriptions(text);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets.at("walrus").descriptions.size(), 3u);
  EXPECT_EQ(sets.at("walrus").Embeddings().size(), 2u);
  EXPECT_EQ(sets.at("walrus").target_count, 10u);
}

TEST(DescriptionsTest, MissingTextNamesLine) {
  std::string text;
  for (int i = 0; i < 16; ++i) text += R"({"class": "a", "text": "t"})" "\n";
  text += R"({"class": "a"})" "\n";
  try {
    ParseDescriptions(text);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 17"), std::string::npos) << e.what();
  }
}

TEST(DescriptionsTest, DimensionMismatchIsValidationError) {
  EXPECT_THROW(ParseDescriptions(R"({"class": "a", "text": "t", "embedding": [1, 2]})" "\n"
                                 R"({"class": "b", "text": "u", "embedding": [1]})" "\n"),
               ValidationError);
}

TEST(DescriptionsTest, IngestFromFile) {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "d.jsonl");
    for (const char* c : {"a", "b"}) {
      for (int i = 0; i < 10; ++i) {
        out << R"({"class": ")" << c << R"(", "text": "t)" << i << R"(", "embedding": [1, 2]})" << "\n";
      }
    }
  }
  const auto sets = IngestDescriptions(dir / "d.jsonl");
  EXPECT_EQ(sets.at("a").descriptions.size(), 10u);
  EXPECT_EQ(sets.at("b").descriptions.size(), 10u);
  EXPECT_THROW(IngestDescriptions(dir / "missing.jsonl"), IoError);
}

TEST(TextClassifierTest, Examples) {
  const Embedding single[] = {{0.2f, -0.4f}};
  EXPECT_EQ(BuildTextClassifier(single), (Embedding{0.2f, -0.4f}));
  const Embedding pair[] = {{1, 0}, {0, 1}};
  EXPECT_EQ(BuildTextClassifier(pair), (Embedding{0.5f, 0.5f}));
}

TEST(TextClassifierTest, MatchesCompensatedMeanOracle) {
  Rng rng(21);
  std::vector<Embedding> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(RandomVector(rng, 512));
  const Embedding w = BuildTextClassifier(rows);
  const auto oracle = KahanMean(rows);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(w[i], static_cast<double>(oracle[i]), 1e-6);
}

TEST(TextClassifierTest, NotNormalizedAndHomogeneous) {
  const Embedding rows[] = {{3, 0}, {3, 0}};
  EXPECT_EQ(BuildTextClassifier(rows), (Embedding{3, 0}));
  Rng rng(4);
  std::vector<Embedding> a, b;
  for (int i = 0; i < 7; ++i) {
    a.push_back(RandomVector(rng, 16));
    Embedding s = a.back();
    for (float& x : s) x *= 4.0f;
    b.push_back(s);
  }
  const Embedding wa = BuildTextClassifier(a), wb = BuildTextClassifier(b);
  for (std::size_t i = 0; i < wa.size(); ++i) EXPECT_NEAR(wb[i], 4.0f * wa[i], 1e-5);
}

TEST(TextClassifierTest, Errors) {
  EXPECT_THROW(BuildTextClassifier({}), ParameterError);
  const Embedding mixed[] = {{1, 2}, {1}};
  EXPECT_THROW(BuildTextClassifier(mixed), ValidationError);
}

}  // namespace
}  // namespace ovc
