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

#include "ovc/binary_io.hpp"
#include "ovc/error.hpp"
#include "ovc/rng.hpp"

namespace ovc {

void AggregatorConfig::Validate() const {
  if (blocks == 0) throw ConfigError("aggregator: blocks must be at least 1");
  if (dim == 0 || mlp_dim == 0 || heads == 0) {
    throw ConfigError("aggregator: dim, mlp_dim and heads must be positive");
  }
  if (dim % heads != 0) {
    throw ConfigError("aggregator: dim " + std::to_string(dim) +
                      " is not divisible by " + std::to_string(heads) + " heads");
  }
}

std::size_t AggregatorConfig::ParameterCount() const {
  const std::size_t d = dim, m = mlp_dim;
  return blocks * (4 * d * d + 2 * 2 * d + d * m + m + m * d + d) + d;
}

AggregatorModel AggregatorModel::Init(const AggregatorConfig& config) {
  config.Validate();
  ParamSet<float> params;
  DeclareAggregatorParams(config, params);
  Rng rng(config.seed);
  for (auto& e : params.entries()) {
    const std::string& name = e.name;
    auto ends_with = [&name](std::string_view s) { return name.ends_with(s); };
    if (ends_with(".scale")) {
      e.value.Fill(1.0f);
    } else if (ends_with(".shift") || ends_with(".bias")) {
      e.value.Fill(0.0f);
    } else {
      const double std_dev = name == "cls_token"
                                 ? 0.02
                                 : 1.0 / std::sqrt(static_cast<double>(e.value.rows()));
      for (float& v : e.value.storage()) {
        v = static_cast<float>(std_dev * rng.Normal());
      }
    }
  }
  return AggregatorModel(config, std::move(params));
}

AggregatorModel::AggregatorModel(AggregatorConfig config, ParamSet<float> params)
    : config_(config), params_(std::move(params)) {
  config_.Validate();
  ParamSet<float> expected;
  DeclareAggregatorParams(config_, expected);
  if (expected.size() != params_.size()) {
    throw ConfigError("aggregator: expected " + std::to_string(expected.size()) +
                      " parameter tensors, got " + std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected.at(i).name != params_.at(i).name ||
        !expected.at(i).value.SameShape(params_.at(i).value)) {
      throw ConfigError("aggregator: parameter " + std::to_string(i) + " ('" +
                        params_.at(i).name + "') does not match the config");
    }
  }
}

Embedding AggregatorModel::Aggregate(std::span<const Embedding> exemplars) const {
  if (exemplars.empty()) throw ParameterError("aggregate: empty exemplar list");
  Tape<float> tape(params_);
  Var x = tape.Constant(StackEmbeddings<float>(exemplars, config_.dim));
  Var out = AggregateOnTape(tape, config_, x);
  const auto& v = tape.Value(out).storage();
  return Embedding(v.begin(), v.end());
}

std::vector<std::uint8_t> EncodeModel(const AggregatorModel& model) {
  const AggregatorConfig& c = model.config();
  ByteWriter w;
  w.Raw(std::string_view(kModelMagic, 4));
  w.U16(kModelVersion);
  w.U32(c.blocks);
  w.U32(c.dim);
  w.U32(c.mlp_dim);
  w.U32(c.heads);
  w.U64(c.seed);
  w.U64(model.params().ScalarCount());
  for (const auto& e : model.params().entries()) {
    for (float v : e.value.storage()) w.F32(v);
  }
  return w.Release();
}

AggregatorModel DecodeModel(const std::vector<std::uint8_t>& bytes,
                            const std::string& context) {
  ByteReader r(bytes, context);
  if (bytes.size() < 4 || r.Raw(4) != std::string_view(kModelMagic, 4)) {
    throw FormatError(context + ": bad magic, expected OVAG");
  }
  const std::uint16_t version = r.U16();
  if (version != kModelVersion) {
    throw FormatError(context + ": unsupported version " + std::to_string(version));
  }
  AggregatorConfig c;
  c.blocks = r.U32();
  c.dim = r.U32();
  c.mlp_dim = r.U32();
  c.heads = r.U32();
  c.seed = r.U64();
  try {
    c.Validate();
  } catch (const ConfigError& e) {
    throw CorruptionError(context + ": " + e.what());
  }
  const std::uint64_t count = r.U64();
  if (count != c.ParameterCount()) {
    throw CorruptionError(context + ": holds " + std::to_string(count) +
                          " parameters, config implies " +
                          std::to_string(c.ParameterCount()));
  }
  r.Require(count * 4);
  ParamSet<float> params;
  DeclareAggregatorParams(c, params);
  for (auto& e : params.entries()) {
    for (float& v : e.value.storage()) {
      v = r.F32();
      if (!std::isfinite(v)) {
        throw ValidationError(context + ": non-finite value in '" + e.name + "'");
      }
    }
  }
  if (!r.AtEnd()) throw CorruptionError(context + ": trailing bytes");
  return AggregatorModel(c, std::move(params));
}

void SaveModel(const AggregatorModel& model, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeModel(model));
}

AggregatorModel LoadModel(const std::filesystem::path& path) {
  return DecodeModel(ReadFileBytes(path), path.string());
}

}  // namespace ovc
