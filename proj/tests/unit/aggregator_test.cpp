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

#include "ovc/aggregator.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "ovc/error.hpp"
#include "test_util.hpp"

namespace ovc {
namespace {

using testing::RandomUnit;

AggregatorConfig Small(std::uint64_t seed = 1) { return AggregatorConfig{2, 16, 32, 4, seed}; }

std::vector<Embedding> RandomSet(Rng& rng, std::size_t k, std::size_t dim) {
  std::vector<Embedding> v;
  for (std::size_t i = 0; i < k; ++i) v.push_back(RandomUnit(rng, dim));
  return v;
}

TEST(AggregatorConfigTest, ParameterCountFormula) {
  for (const AggregatorConfig& c : {AggregatorConfig{}, Small(), AggregatorConfig{1, 8, 8, 1, 0}}) {
    const std::size_t d = c.dim, m = c.mlp_dim, n = c.blocks;
    const std::size_t per_block = 4 * d * d + 4 * d + d * m + m + m * d + d;
    EXPECT_EQ(c.ParameterCount(), n * per_block + d);
    ParamSet<float> p;
    DeclareAggregatorParams(c, p);
    EXPECT_EQ(p.ScalarCount(), c.ParameterCount());
  }
}

TEST(AggregatorConfigTest, Validation) {
  EXPECT_THROW((AggregatorConfig{0, 16, 32, 4, 0}).Validate(), ConfigError);
  EXPECT_THROW((AggregatorConfig{1, 18, 32, 4, 0}).Validate(), ConfigError);
  EXPECT_THROW((AggregatorConfig{1, 16, 0, 4, 0}).Validate(), ConfigError);
  EXPECT_NO_THROW(AggregatorConfig{}.Validate());
}

TEST(AggregatorTest, OutputIsUnitNorm) {
  const auto model = AggregatorModel::Init(Small());
  Rng rng(3);
  for (std::size_t k : {1u, 2u, 5u, 9u}) {
    const auto out = model.Aggregate(RandomSet(rng, k, 16));
    ASSERT_EQ(out.size(), 16u);
    EXPECT_NEAR(testing::L2(out), 1.0, 1e-5);
  }
}

TEST(AggregatorTest, PermutationInvariant) {
  const auto model = AggregatorModel::Init(Small(7));
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto set = RandomSet(rng, 2 + trial % 4, 16);
    const auto a = model.Aggregate(set);
    rng.Shuffle(set);
    const auto b = model.Aggregate(set);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-5);
  }
}

TEST(AggregatorTest, InitIsDeterministicPerSeed) {
  EXPECT_EQ(AggregatorModel::Init(Small(3)), AggregatorModel::Init(Small(3)));
  EXPECT_FALSE(AggregatorModel::Init(Small(3)) == AggregatorModel::Init(Small(4)));
}

TEST(AggregatorTest, InputErrors) {
  const auto model = AggregatorModel::Init(Small());
  EXPECT_THROW(model.Aggregate({}), ParameterError);
  const Embedding wrong[] = {Embedding(8, 0.1f)};
  EXPECT_THROW(model.Aggregate(wrong), ValidationError);
}

TEST(AggregatorTest, FloatAndDoubleForwardAgree) {
  const AggregatorConfig cfg = Small(9);
  const auto model = AggregatorModel::Init(cfg);
  Rng rng(6);
  const auto set = RandomSet(rng, 4, 16);
  const auto f = model.Aggregate(set);
  const ParamSet<double> pd = model.params().Cast<double>();
  Tape<double> tape(pd);
  Var x = tape.Constant(StackEmbeddings<double>(set, 16));
  const Tensor<double>& d = tape.Value(AggregateOnTape(tape, cfg, x));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], d[i], 1e-5);
}

TEST(AggregatorTest, ConstructorChecksParameterLayout) {
  ParamSet<float> p;
  DeclareAggregatorParams(Small(), p);
  EXPECT_NO_THROW(AggregatorModel(Small(), p));
  ParamSet<float> wrong;
  DeclareAggregatorParams(AggregatorConfig{1, 16, 32, 4, 0}, wrong);
  EXPECT_THROW(AggregatorModel(Small(), wrong), ConfigError);
}

TEST(CheckpointTest, RoundTripIsExact) {
  testing::TempDir dir;
  const auto model = AggregatorModel::Init(Small(11));
  SaveModel(model, dir / "m.ovag");
  EXPECT_EQ(LoadModel(dir / "m.ovag"), model);
  EXPECT_EQ(EncodeModel(model), EncodeModel(LoadModel(dir / "m.ovag")));
}

TEST(CheckpointTest, SizeFollowsLayout) {
  const auto model = AggregatorModel::Init(Small());
  const std::size_t header = 4 + 2 + 4 * 4 + 8 + 8;
  EXPECT_EQ(EncodeModel(model).size(), header + 4 * Small().ParameterCount());
}

TEST(CheckpointTest, CorruptInputsRejected) {
  const auto bytes = EncodeModel(AggregatorModel::Init(Small()));
  auto magic = bytes;
  magic[1] = 'X';
  EXPECT_THROW(DecodeModel(magic), FormatError);
  auto version = bytes;
  version[4] = 3;
  EXPECT_THROW(DecodeModel(version), FormatError);
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 3);
  EXPECT_THROW(DecodeModel(cut), CorruptionError);
  auto trailing = bytes;
  trailing.push_back(1);
  EXPECT_THROW(DecodeModel(trailing), CorruptionError);
}

}  // namespace
}  // namespace ovc
