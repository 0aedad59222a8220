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

#include "ovc/tta.hpp"

#include <gtest/gtest.h>

#include "ovc/error.hpp"

namespace ovc {
namespace {

ExemplarCatalog SmallCatalog() {
  ExemplarCatalog c;
  CatalogEntry a;
  a.class_id = "a";
  a.exemplars = {{"a1", SourceTag::kIn21k}, {"a2", SourceTag::kIn21k}};
  a.count = 2;
  c.classes["a"] = a;
  CatalogEntry b;
  b.class_id = "b";
  c.classes["b"] = b;
  return c;
}

TEST(TtaRecipeTest, NamedRecipes) {
  const TtaRecipe none = TtaRecipe::Named(TtaKind::kNone);
  EXPECT_EQ(none.variants, 1u);
  EXPECT_FALSE(none.horizontal_flip);
  const TtaRecipe harsh = TtaRecipe::Named(TtaKind::kHarsh);
  EXPECT_EQ(harsh.variants, 5u);
  EXPECT_DOUBLE_EQ(harsh.min_scale, 0.5);
  const TtaRecipe gentle = TtaRecipe::Named(TtaKind::kGentle);
  EXPECT_EQ(gentle.variants, 5u);
  EXPECT_DOUBLE_EQ(gentle.min_scale, 0.8);
  EXPECT_DOUBLE_EQ(gentle.max_scale, 1.0);
  for (TtaKind k : {TtaKind::kNone, TtaKind::kHarsh, TtaKind::kGentle}) {
    EXPECT_EQ(ParseTtaKind(TtaKindName(k)), k);
  }
  TtaRecipe bad = gentle;
  bad.min_scale = 0.0;
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = gentle;
  bad.variants = 0;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(PlanTtaTest, JobsPerExemplarWithinRecipeBounds) {
  for (TtaKind kind : {TtaKind::kHarsh, TtaKind::kGentle}) {
    const TtaRecipe r = TtaRecipe::Named(kind);
    const TtaPlan plan = PlanTta(SmallCatalog(), r, 7);
    ASSERT_EQ(plan.jobs.size(), 10u);
    EXPECT_EQ(plan.skipped, (std::vector<std::string>{"b"}));
    for (const TtaJob& j : plan.jobs) {
      EXPECT_GE(j.scale, r.min_scale);
      EXPECT_LE(j.scale, r.max_scale);
      EXPECT_NEAR(j.crop.w * j.crop.h, j.scale, 1e-12);
      EXPECT_GE(j.crop.x, 0.0);
      EXPECT_GE(j.crop.y, 0.0);
      EXPECT_LE(j.crop.x + j.crop.w, 1.0 + 1e-12);
      EXPECT_LE(j.crop.y + j.crop.h, 1.0 + 1e-12);
      for (double f : {j.brightness, j.contrast, j.saturation}) {
        EXPECT_GE(f, 0.6);
        EXPECT_LE(f, 1.4);
      }
    }
    EXPECT_EQ(plan.jobs[4].variant, 4u);
    EXPECT_EQ(plan.jobs[5].exemplar_id, "a2");
  }
}

TEST(PlanTtaTest, NoneIsIdentity) {
  const TtaPlan plan = PlanTta(SmallCatalog(), TtaRecipe::Named(TtaKind::kNone), 7);
  ASSERT_EQ(plan.jobs.size(), 2u);
  for (const TtaJob& j : plan.jobs) {
    EXPECT_DOUBLE_EQ(j.scale, 1.0);
    EXPECT_DOUBLE_EQ(j.crop.w, 1.0);
    EXPECT_FALSE(j.flip);
    EXPECT_DOUBLE_EQ(j.brightness, 1.0);
  }
}

TEST(PlanTtaTest, DeterministicPerSeedAndRoundTrips) {
  const TtaRecipe r = TtaRecipe::Named(TtaKind::kGentle);
  const std::string a = TtaJobsToJsonl(PlanTta(SmallCatalog(), r, 3).jobs);
  EXPECT_EQ(a, TtaJobsToJsonl(PlanTta(SmallCatalog(), r, 3).jobs));
  EXPECT_NE(a, TtaJobsToJsonl(PlanTta(SmallCatalog(), r, 4).jobs));
  EXPECT_EQ(TtaJobsToJsonl(TtaJobsFromJsonl(a)), a);
}

}  // namespace
}  // namespace ovc
