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

#ifndef OVC_VECTOR_OPS_HPP_
#define OVC_VECTOR_OPS_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ovc/embedding_bank.hpp"
#include "ovc/error.hpp"

namespace ovc {

inline double Dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

inline double Norm(std::span<const float> a) { return std::sqrt(Dot(a, a)); }

// Unit vector in the direction of `a`. Throws ParameterError on a zero
// vector.
inline Embedding Normalized(std::span<const float> a) {
  const double n = Norm(a);
  if (!(n > 0.0)) throw ParameterError("cannot normalize a zero vector");
  Embedding out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(a[i]) / n);
  }
  return out;
}

// Component-wise mean accumulated in double precision.
inline Embedding MeanOf(std::span<const Embedding> vectors, const char* what) {
  if (vectors.empty()) {
    throw ParameterError(std::string(what) + ": empty embedding list");
  }
  const std::size_t dim = vectors.front().size();
  std::vector<double> acc(dim, 0.0);
  for (std::size_t v = 0; v < vectors.size(); ++v) {
    if (vectors[v].size() != dim) {
      throw ValidationError(std::string(what) + ": embedding " + std::to_string(v) +
                            " has dimension " + std::to_string(vectors[v].size()) +
                            ", expected " + std::to_string(dim));
    }
    for (std::size_t i = 0; i < dim; ++i) acc[i] += vectors[v][i];
  }
  Embedding out(dim);
  const double m = static_cast<double>(vectors.size());
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] / m);
  return out;
}

}  // namespace ovc

#endif  // OVC_VECTOR_OPS_HPP_
