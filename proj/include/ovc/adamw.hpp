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

#ifndef OVC_ADAMW_HPP_
#define OVC_ADAMW_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "ovc/error.hpp"
#include "ovc/param_set.hpp"
#include "ovc/tensor.hpp"

namespace ovc {

struct AdamWHyper {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

// Adam with decoupled weight decay. Moments are created lazily on the first
// step so that the state can be constructed before the parameters exist.
template <typename T>
class AdamW {
 public:
  explicit AdamW(AdamWHyper hyper = {}) : hyper_(hyper) {}

  const AdamWHyper& hyper() const { return hyper_; }
  std::uint64_t step() const { return step_; }
  const std::vector<Tensor<T>>& first_moments() const { return m_; }
  const std::vector<Tensor<T>>& second_moments() const { return v_; }

  // One update of every parameter from its gradient slot. Throws before
  // touching anything if a gradient is missing or mis-shaped.
  void Step(ParamSet<T>& params) {
    for (const auto& e : params.entries()) {
      if (!e.has_grad) {
        throw ConfigError("adamw: parameter '" + e.name + "' has no gradient");
      }
      if (!e.grad.SameShape(e.value)) {
        throw ShapeError("adamw: gradient shape mismatch for '" + e.name + "'");
      }
    }
    if (m_.empty()) {
      for (const auto& e : params.entries()) {
        m_.emplace_back(e.value.shape());
        v_.emplace_back(e.value.shape());
      }
    } else if (m_.size() != params.size()) {
      throw ShapeError("adamw: parameter set changed between steps");
    }
    ++step_;
    const double t = static_cast<double>(step_);
    const double bc1 = 1.0 - std::pow(hyper_.beta1, t);
    const double bc2 = 1.0 - std::pow(hyper_.beta2, t);
    const T lr = static_cast<T>(hyper_.learning_rate);
    const T decay = static_cast<T>(hyper_.learning_rate * hyper_.weight_decay);
    const T b1 = static_cast<T>(hyper_.beta1), b2 = static_cast<T>(hyper_.beta2);
    const T eps = static_cast<T>(hyper_.epsilon);
    for (std::size_t p = 0; p < params.size(); ++p) {
      auto& e = params.at(p);
      Tensor<T>& m = m_[p];
      Tensor<T>& v = v_[p];
      for (std::size_t i = 0; i < e.value.size(); ++i) {
        const T g = e.grad[i];
        m[i] = b1 * m[i] + (T(1) - b1) * g;
        v[i] = b2 * v[i] + (T(1) - b2) * g * g;
        const T m_hat = m[i] / static_cast<T>(bc1);
        const T v_hat = v[i] / static_cast<T>(bc2);
        e.value[i] -= decay * e.value[i];
        e.value[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
      }
    }
  }

 private:
  AdamWHyper hyper_;
  std::uint64_t step_ = 0;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
};

}  // namespace ovc

#endif  // OVC_ADAMW_HPP_
