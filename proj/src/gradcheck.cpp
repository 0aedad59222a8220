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

#include <algorithm>
#include <cmath>

#include "ovc/autodiff.hpp"

namespace ovc {

std::vector<Tensor<double>> FiniteDiffGradient(const LossGraph<double>& graph,
                                               ParamSet<double>& params,
                                               double epsilon) {
  if (!(epsilon > 0.0)) {
    throw ParameterError("finite_diff_gradient: epsilon must be positive");
  }
  std::vector<Tensor<double>> grads;
  grads.reserve(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor<double> g(params.at(p).value.shape());
    for (std::size_t i = 0; i < g.size(); ++i) {
      double& coord = params.at(p).value[i];
      const double saved = coord;
      coord = saved + epsilon;
      const double up = EvaluateLoss(graph, params);
      coord = saved - epsilon;
      const double down = EvaluateLoss(graph, params);
      coord = saved;
      g[i] = (up - down) / (2.0 * epsilon);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double MaxRelativeError(std::span<const Tensor<double>> analytic,
                        std::span<const Tensor<double>> numeric,
                        double floor) {
  if (analytic.size() != numeric.size()) {
    throw ShapeError("MaxRelativeError: parameter counts differ");
  }
  double worst = 0.0;
  for (std::size_t p = 0; p < analytic.size(); ++p) {
    if (!analytic[p].SameShape(numeric[p])) {
      throw ShapeError("MaxRelativeError: shapes differ");
    }
    for (std::size_t i = 0; i < analytic[p].size(); ++i) {
      const double a = analytic[p][i];
      const double n = numeric[p][i];
      const double scale = std::max({std::abs(a), std::abs(n), floor});
      worst = std::max(worst, std::abs(a - n) / scale);
    }
  }
  return worst;
}

}  // namespace ovc
