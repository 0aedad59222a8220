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

#ifndef OVC_AGGREGATOR_HPP_
#define OVC_AGGREGATOR_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ovc/autodiff.hpp"
#include "ovc/embedding_bank.hpp"
#include "ovc/param_set.hpp"

namespace ovc {

struct AggregatorConfig {
  std::uint32_t blocks = 4;
  std::uint32_t dim = 512;
  std::uint32_t mlp_dim = 2048;
  std::uint32_t heads = 8;
  std::uint64_t seed = 0;

  // Throws ConfigError on zero sizes or dim not divisible by heads.
  void Validate() const;

  // blocks * (4 d^2 + 2 * 2d + d * mlp + mlp + mlp * d + d) + d
  std::size_t ParameterCount() const;

  friend bool operator==(const AggregatorConfig&, const AggregatorConfig&) = default;
};

// Adds the aggregator parameters to `params` in checkpoint order, all zero.
template <typename T>
void DeclareAggregatorParams(const AggregatorConfig& config, ParamSet<T>& params) {
  const std::size_t d = config.dim, m = config.mlp_dim;
  for (std::uint32_t b = 0; b < config.blocks; ++b) {
    const std::string p = "block" + std::to_string(b) + ".";
    params.Add(p + "ln1.scale", Tensor<T>({d}));
    params.Add(p + "ln1.shift", Tensor<T>({d}));
    params.Add(p + "attn.query", Tensor<T>({d, d}));
    params.Add(p + "attn.key", Tensor<T>({d, d}));
    params.Add(p + "attn.value", Tensor<T>({d, d}));
    params.Add(p + "attn.output", Tensor<T>({d, d}));
    params.Add(p + "ln2.scale", Tensor<T>({d}));
    params.Add(p + "ln2.shift", Tensor<T>({d}));
    params.Add(p + "mlp.fc1.weight", Tensor<T>({d, m}));
    params.Add(p + "mlp.fc1.bias", Tensor<T>({m}));
    params.Add(p + "mlp.fc2.weight", Tensor<T>({m, d}));
    params.Add(p + "mlp.fc2.bias", Tensor<T>({d}));
  }
  params.Add("cls_token", Tensor<T>({d}));
}

// Records the set encoder on `tape`. `exemplars` is a k x d matrix; the
// sequence [cls; exemplars] runs through pre-norm blocks without positional
// encoding and the final cls row is returned L2-normalized (1 x d).
template <typename T>
Var AggregateOnTape(Tape<T>& tape, const AggregatorConfig& config, Var exemplars) {
  const std::size_t d = config.dim;
  const Tensor<T>& x = tape.Value(exemplars);
  if (x.cols() != d) {
    throw ValidationError("aggregate: exemplar dimension " + std::to_string(x.cols()) +
                          " does not match model dimension " + std::to_string(d));
  }
  if (x.rows() == 0) throw ParameterError("aggregate: empty exemplar set");
  const std::size_t head_dim = d / config.heads;
  const T attn_scale = T(1) / std::sqrt(static_cast<T>(head_dim));

  const Var parts[] = {tape.Param("cls_token"), exemplars};
  Var h = tape.ConcatRows(parts);
  for (std::uint32_t b = 0; b < config.blocks; ++b) {
    const std::string p = "block" + std::to_string(b) + ".";
    Var a = tape.LayerNorm(h, tape.Param(p + "ln1.scale"), tape.Param(p + "ln1.shift"));
    Var q = tape.MatMul(a, tape.Param(p + "attn.query"));
    Var k = tape.MatMul(a, tape.Param(p + "attn.key"));
    Var v = tape.MatMul(a, tape.Param(p + "attn.value"));
    std::vector<Var> heads;
    heads.reserve(config.heads);
    for (std::uint32_t hd = 0; hd < config.heads; ++hd) {
      const std::size_t off = hd * head_dim;
      Var scores = tape.Scale(tape.MatMulNT(tape.SliceCols(q, off, head_dim),
                                            tape.SliceCols(k, off, head_dim)),
                              attn_scale);
      heads.push_back(tape.MatMul(tape.Softmax(scores), tape.SliceCols(v, off, head_dim)));
    }
    Var merged = config.heads == 1 ? heads.front() : tape.ConcatCols(heads);
    h = tape.Add(h, tape.MatMul(merged, tape.Param(p + "attn.output")));

    Var n = tape.LayerNorm(h, tape.Param(p + "ln2.scale"), tape.Param(p + "ln2.shift"));
    Var hidden = tape.Gelu(tape.AddRow(tape.MatMul(n, tape.Param(p + "mlp.fc1.weight")),
                                       tape.Param(p + "mlp.fc1.bias")));
    Var out = tape.AddRow(tape.MatMul(hidden, tape.Param(p + "mlp.fc2.weight")),
                          tape.Param(p + "mlp.fc2.bias"));
    h = tape.Add(h, out);
  }
  return tape.L2Normalize(tape.SliceRows(h, 0, 1));
}

// Stacks embeddings into a k x d tensor.
template <typename T>
Tensor<T> StackEmbeddings(std::span<const Embedding> embeddings, std::size_t dim) {
  if (embeddings.empty()) throw ParameterError("empty exemplar set");
  std::vector<T> data;
  data.reserve(embeddings.size() * dim);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (embeddings[i].size() != dim) {
      throw ValidationError("exemplar " + std::to_string(i) + " has dimension " +
                            std::to_string(embeddings[i].size()) + ", expected " +
                            std::to_string(dim));
    }
    for (float v : embeddings[i]) data.push_back(static_cast<T>(v));
  }
  return Tensor<T>({embeddings.size(), dim}, std::move(data));
}

// Transformer set encoder with a learnable cls token.
class AggregatorModel {
 public:
  // Scaled-normal initialization (std 1/sqrt(fan_in) for weight matrices,
  // 0.02 for the cls token), unit layer-norm scales, zero biases.
  static AggregatorModel Init(const AggregatorConfig& config);

  // Adopts existing parameters; names and shapes must match the config.
  AggregatorModel(AggregatorConfig config, ParamSet<float> params);

  const AggregatorConfig& config() const { return config_; }
  const ParamSet<float>& params() const { return params_; }
  ParamSet<float>& mutable_params() { return params_; }

  // Unit-norm classifier from k >= 1 exemplar embeddings.
  Embedding Aggregate(std::span<const Embedding> exemplars) const;

  friend bool operator==(const AggregatorModel& a, const AggregatorModel& b) {
    return a.config_ == b.config_ && a.params_ == b.params_;
  }

 private:
  AggregatorConfig config_;
  ParamSet<float> params_;
};

inline Embedding Aggregate(const AggregatorModel& model,
                           std::span<const Embedding> exemplars) {
  return model.Aggregate(exemplars);
}

// Checkpoint layout, little-endian:
//   "OVAG" | u16 version=1 | u32 blocks | u32 dim | u32 mlp_dim | u32 heads |
//   u64 seed | u64 scalar count | parameters as f32 in declaration order
inline constexpr char kModelMagic[4] = {'O', 'V', 'A', 'G'};
inline constexpr std::uint16_t kModelVersion = 1;

std::vector<std::uint8_t> EncodeModel(const AggregatorModel& model);
AggregatorModel DecodeModel(const std::vector<std::uint8_t>& bytes,
                            const std::string& context = "checkpoint");
void SaveModel(const AggregatorModel& model, const std::filesystem::path& path);
AggregatorModel LoadModel(const std::filesystem::path& path);

}  // namespace ovc

#endif  // OVC_AGGREGATOR_HPP_
