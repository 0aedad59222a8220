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

#ifndef OVC_TESTS_ORACLES_HPP_
#define OVC_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ovc/average_precision.hpp"
#include "ovc/embedding_bank.hpp"

namespace ovc::testing {

// -log(e^{a.p/t} / (e^{a.p/t} + sum_n e^{a.n/t})) in long double, written as
// log(1 + sum_n e^{(a.n - a.p)/t}) so that losses near zero keep their digits.
inline long double DirectInfoNce(std::span<const float> a, std::span<const float> p,
                                 std::span<const Embedding> negatives, long double t) {
  auto dot = [](std::span<const float> x, std::span<const float> y) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(x[i]) * y[i];
    return s;
  };
  const long double pos = dot(a, p);
  long double ratio = 0.0L;
  for (const Embedding& n : negatives) ratio += std::exp((dot(a, n) - pos) / t);
  return std::log1p(ratio);
}

// Straightforward per-class evaluation with integer recall thresholds.
inline double OracleClassAp(std::vector<DetectionRecord> dets,
                            const std::vector<GroundTruth>& gts, double threshold) {
  if (gts.empty()) return 0.0;
  std::stable_sort(dets.begin(), dets.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  std::vector<bool> used(gts.size(), false);
  std::vector<long long> tp_at;
  long long tp = 0;
  for (const auto& d : dets) {
    double best = -1.0;
    std::size_t best_j = gts.size();
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (used[j] || gts[j].image != d.image) continue;
      const Box& a = d.box;
      const Box& b = gts[j].box;
      const double iw = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
      const double ih = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
      const double inter = iw * ih;
      const double iou = inter / (a.w * a.h + b.w * b.h - inter);
      if (iou >= threshold && iou > best) best = iou, best_j = j;
    }
    if (best_j < gts.size()) {
      used[best_j] = true;
      ++tp;
    }
    tp_at.push_back(tp);
  }
  const long long n = static_cast<long long>(gts.size());
  long double total = 0.0L;
  for (long long r = 0; r <= 100; ++r) {
    long double best_p = 0.0L;
    for (std::size_t i = 0; i < tp_at.size(); ++i) {
      if (tp_at[i] * 100 >= r * n) {
        best_p = std::max(best_p, static_cast<long double>(tp_at[i]) / (i + 1));
      }
    }
    total += best_p;
  }
  return static_cast<double>(total / 101.0L);
}

}  // namespace ovc::testing

#endif  // OVC_TESTS_ORACLES_HPP_
