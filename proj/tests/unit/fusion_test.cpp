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

#include "ovc/fusion.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ovc/aggregator.hpp"
#include "ovc/benchmark.hpp"
#include "ovc/error.hpp"
#include "ovc/synthetic.hpp"
#include "test_util.hpp"

namespace ovc {
namespace {

using testing::KahanMean;
using testing::L2;
using testing::RandomUnit;
using testing::RandomVector;
using testing::TempDir;

TEST(FuseMultimodalTest, WorkedExample) {
  const Embedding text{3, 0}, image{0, 4};
  const Embedding fused = FuseMultimodal(text, image);
  EXPECT_FLOAT_EQ(fused[0], 1.0f);
  EXPECT_FLOAT_EQ(fused[1], 1.0f);
  EXPECT_NEAR(L2(fused), std::sqrt(2.0), 1e-6);
}

TEST(FuseMultimodalTest, MatchesNormalizedSumOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + rng.Below(20);
    const Embedding t = RandomVector(rng, d, rng.Uniform(0.1, 10.0));
    const Embedding v = RandomVector(rng, d, rng.Uniform(0.1, 10.0));
    long double nt = 0, nv = 0;
    for (std::size_t i = 0; i < d; ++i) {
      nt += static_cast<long double>(t[i]) * t[i];
      nv += static_cast<long double>(v[i]) * v[i];
    }
    nt = std::sqrt(nt);
    nv = std::sqrt(nv);
    const Embedding got = FuseMultimodal(t, v);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_NEAR(got[i], static_cast<double>(t[i] / nt + v[i] / nv), 1e-6);
    }
    EXPECT_LE(L2(got), 2.0 + 1e-6);
  }
}

TEST(FuseMultimodalTest, Errors) {
  EXPECT_THROW(FuseMultimodal(Embedding{1, 0}, Embedding{1, 0, 0}), ValidationError);
  EXPECT_THROW(FuseMultimodal(Embedding{0, 0}, Embedding{1, 0}), ParameterError);
  EXPECT_THROW(FuseMultimodal(Embedding{1, 0}, Embedding{-2, 0}), DataError);
}

TEST(MeanBaselineTest, WorkedExample) {
  const std::vector<Embedding> xs = {{1, 0}, {0, 1}};
  const Embedding m = MeanBaseline(xs);
  EXPECT_NEAR(m[0], std::sqrt(0.5), 1e-7);
  EXPECT_NEAR(m[1], std::sqrt(0.5), 1e-7);
}

TEST(MeanBaselineTest, MatchesKahanOracle) {
  Rng rng(6);
  std::vector<Embedding> xs;
  for (int i = 0; i < 25; ++i) xs.push_back(RandomUnit(rng, 64));
  const std::vector<long double> mean = KahanMean(xs);
  long double n = 0;
  for (long double v : mean) n += v * v;
  n = std::sqrt(n);
  const Embedding got = MeanBaseline(xs);
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i], static_cast<double>(mean[i] / n), 1e-6);
  }
  EXPECT_NEAR(L2(got), 1.0, 1e-6);
}

TEST(MeanBaselineTest, Errors) {
  EXPECT_THROW(MeanBaseline({}), ParameterError);
  const std::vector<Embedding> cancel = {{1, 0}, {-1, 0}};
  EXPECT_THROW(MeanBaseline(cancel), DataError);
}

TEST(ModalityTest, NamesRoundTrip) {
  for (Modality m : {Modality::kText, Modality::kVisionAgg, Modality::kVisionMean,
                     Modality::kMultimodal}) {
    EXPECT_EQ(ParseModality(ModalityName(m)), m);
  }
  EXPECT_EQ(ParseModality("mm"), Modality::kMultimodal);
  EXPECT_THROW(ParseModality("audio"), ConfigError);
}

ClassifierBank SampleBank() {
  ClassifierBank bank(3);
  bank.Set("cat", ClassifierEntry{{1, 0, 0}, Modality::kText, "descriptions:4"});
  bank.Set("dog", ClassifierEntry{{0.5f, 0.5f, 1.0f}, Modality::kMultimodal, "fused"});
  return bank;
}

TEST(ClassifierBankTest, Validation) {
  ClassifierBank bank(2);
  EXPECT_THROW(bank.Set("", ClassifierEntry{{1, 0}}), ValidationError);
  EXPECT_THROW(bank.Set("a", ClassifierEntry{{1, 0, 0}}), ValidationError);
  EXPECT_THROW(bank.Set("a", ClassifierEntry{{NAN, 0}}), ValidationError);
  EXPECT_THROW(bank.Set("a", ClassifierEntry{{2, 1}, Modality::kMultimodal}), ValidationError);
  EXPECT_THROW(bank.at("missing"), LookupError);
}

TEST(ClassifierBankTest, EncodeRoundTripAndLayout) {
  const ClassifierBank bank = SampleBank();
  const auto bytes = EncodeClassifierBank(bank);
  // magic, version, dimension, count, then per entry: id, modality, provenance, values.
  const std::size_t expected = 4 + 2 + 4 + 4 + (2 + 3 + 1 + 2 + 14 + 12) + (2 + 3 + 1 + 2 + 5 + 12);
  EXPECT_EQ(bytes.size(), expected);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "OVCB");
  EXPECT_EQ(DecodeClassifierBank(bytes), bank);

  TempDir dir;
  SaveClassifierBank(bank, dir / "c.ovcb");
  EXPECT_EQ(LoadClassifierBank(dir / "c.ovcb"), bank);
  EXPECT_THROW(LoadClassifierBank(dir / "missing.ovcb"), IoError);
}

TEST(ClassifierBankTest, CorruptInputs) {
  const auto bytes = EncodeClassifierBank(SampleBank());
  for (std::size_t n = 4; n < bytes.size(); ++n) {
    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + n);
    EXPECT_THROW(DecodeClassifierBank(cut), CorruptionError) << "length " << n;
  }
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(DecodeClassifierBank(bad_magic), FormatError);
  auto bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(DecodeClassifierBank(bad_version), FormatError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(DecodeClassifierBank(trailing), CorruptionError);
}

TEST(BuildVisualClassifiersTest, MeanAndAggregatorModes) {
  const EmbeddingBank bank = GenClusterBank(ClusterSpec{4, 8, 6, 0.1, 2});
  const ClassifierBank mean = BuildVisualClassifiers(bank, Modality::kVisionMean, 3);
  ASSERT_EQ(mean.size(), 4u);
  for (const auto& [id, entry] : mean.entries()) {
    std::vector<Embedding> first;
    for (std::size_t i = 0; i < 3; ++i) first.push_back(bank.Records(id)[i].values);
    EXPECT_EQ(entry.vector, MeanBaseline(first));
    EXPECT_EQ(entry.modality, Modality::kVisionMean);
    EXPECT_EQ(entry.provenance, "exemplars:3");
  }
  const AggregatorModel model = AggregatorModel::Init(AggregatorConfig{1, 8, 16, 2, 1});
  const ClassifierBank agg = BuildVisualClassifiers(bank, Modality::kVisionAgg, 0, &model);
  for (const auto& [id, entry] : agg.entries()) {
    std::vector<Embedding> all;
    for (const auto& r : bank.Records(id)) all.push_back(r.values);
    EXPECT_EQ(entry.vector, model.Aggregate(all));
    EXPECT_EQ(entry.provenance, "exemplars:6");
  }
  EXPECT_THROW(BuildVisualClassifiers(bank, Modality::kVisionAgg, 0), ConfigError);
  EXPECT_THROW(BuildVisualClassifiers(bank, Modality::kText, 0), ConfigError);
}

TEST(FuseClassifierBanksTest, FusesEveryClassAndRejectsMismatch) {
  ClassifierBank text(2), visual(2);
  text.Set("a", ClassifierEntry{{3, 0}, Modality::kText, "t"});
  visual.Set("a", ClassifierEntry{{0, 4}, Modality::kVisionAgg, "v"});
  const ClassifierBank fused = FuseClassifierBanks(text, visual);
  EXPECT_EQ(fused.at("a").modality, Modality::kMultimodal);
  EXPECT_FLOAT_EQ(fused.at("a").vector[0], 1.0f);
  EXPECT_FLOAT_EQ(fused.at("a").vector[1], 1.0f);
  visual.Set("b", ClassifierEntry{{0, 1}, Modality::kVisionAgg, "v"});
  EXPECT_THROW(FuseClassifierBanks(text, visual), ValidationError);
}

}  // namespace
}  // namespace ovc
