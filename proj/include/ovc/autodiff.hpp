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

// Minimal reverse-mode differentiation over dense matrices.
//
// A Tape records every primitive applied during a forward pass. Calling
// Backward() on a scalar node walks the record in reverse and accumulates
// gradients into every node that depends on a parameter or an input leaf.
// Gradients of parameter leaves are added to the gradient slots of the
// bound ParamSet.
//
// The primitive set is deliberately small: matrix products, addition,
// elementwise product, scaling, layer normalization, row softmax, GELU, row
// L2 normalization, row/column slicing and concatenation, reductions, and a
// fused softmax cross-entropy used by the contrastive loss.

#ifndef OVC_AUTODIFF_HPP_
#define OVC_AUTODIFF_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ovc/error.hpp"
#include "ovc/param_set.hpp"
#include "ovc/tensor.hpp"

namespace ovc {

// Handle to a node recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

template <typename T>
class Tape {
 public:
  Tape() = default;
  // Parameter gradients are accumulated into `params` on Backward().
  explicit Tape(ParamSet<T>* params) : params_(params), grad_sink_(params) {}
  // Forward-only use of parameters; Backward() leaves them untouched.
  explicit Tape(const ParamSet<T>& params) : params_(&params) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf bound to a named parameter. Repeated calls return the same node.
  Var Param(std::string_view name) {
    if (params_ == nullptr) {
      throw ConfigError("Tape: no ParamSet bound, cannot fetch '" +
                        std::string(name) + "'");
    }
    const std::size_t index = params_->IndexOf(name);
    auto it = param_nodes_.find(index);
    if (it != param_nodes_.end()) return Var{it->second};
    Var v = Push(params_->at(index).value, true);
    nodes_[v.id].param_index = static_cast<std::ptrdiff_t>(index);
    param_nodes_.emplace(index, v.id);
    return v;
  }

  // Leaf that never receives a gradient.
  Var Constant(Tensor<T> value) { return Push(std::move(value), false); }

  // Leaf whose gradient is kept and can be read through Grad().
  Var Input(Tensor<T> value) { return Push(std::move(value), true); }

  const Tensor<T>& Value(Var v) const { return nodes_.at(v.id).value; }

  // Gradient of the last Backward() target with respect to `v`. Nodes that
  // do not depend on any parameter or input report an all-zero gradient.
  Tensor<T> Grad(Var v) const {
    const Node& n = nodes_.at(v.id);
    if (n.grad.empty()) return Tensor<T>(n.value.shape());
    return n.grad;
  }

  std::size_t NodeCount() const { return nodes_.size(); }

  // ---- primitives -------------------------------------------------------

  // (m x k) * (k x n)
  Var MatMul(Var a, Var b) {
    const Tensor<T>& A = Value(a);
    const Tensor<T>& B = Value(b);
    RequireMatrix("matmul", A);
    RequireMatrix("matmul", B);
    if (A.cols() != B.rows()) {
      throw ShapeError("matmul: inner dimensions differ " +
                       Tensor<T>::ShapeString(A.shape()) + " x " +
                       Tensor<T>::ShapeString(B.shape()));
    }
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    Tensor<T> out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        const T aip = A[i * k + p];
        const T* brow = &B[p * n];
        T* orow = &out[i * n];
        for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
      }
    }
    Var c = Record("matmul", std::move(out), {a, b});
    SetBackward(c, [this, a, b, c, m, k, n]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      const Tensor<T>& A = nodes_[a.id].value;
      const Tensor<T>& B = nodes_[b.id].value;
      if (Needs(a)) {
        Tensor<T>& GA = nodes_[a.id].grad;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            T acc{0};
            for (std::size_t j = 0; j < n; ++j) {
              acc += G[i * n + j] * B[p * n + j];
            }
            GA[i * k + p] += acc;
          }
        }
      }
      if (Needs(b)) {
        Tensor<T>& GB = nodes_[b.id].grad;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const T aip = A[i * k + p];
            for (std::size_t j = 0; j < n; ++j) {
              GB[p * n + j] += aip * G[i * n + j];
            }
          }
        }
      }
    });
    return c;
  }

  // (m x k) * (n x k)^T
  Var MatMulNT(Var a, Var b) {
    const Tensor<T>& A = Value(a);
    const Tensor<T>& B = Value(b);
    RequireMatrix("matmul_nt", A);
    RequireMatrix("matmul_nt", B);
    if (A.cols() != B.cols()) {
      throw ShapeError("matmul_nt: row lengths differ " +
                       Tensor<T>::ShapeString(A.shape()) + " vs " +
                       Tensor<T>::ShapeString(B.shape()));
    }
    const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
    Tensor<T> out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        T acc{0};
        for (std::size_t p = 0; p < k; ++p) acc += A[i * k + p] * B[j * k + p];
        out[i * n + j] = acc;
      }
    }
    Var c = Record("matmul_nt", std::move(out), {a, b});
    SetBackward(c, [this, a, b, c, m, k, n]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      const Tensor<T>& A = nodes_[a.id].value;
      const Tensor<T>& B = nodes_[b.id].value;
      if (Needs(a)) {
        Tensor<T>& GA = nodes_[a.id].grad;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const T g = G[i * n + j];
            for (std::size_t p = 0; p < k; ++p) GA[i * k + p] += g * B[j * k + p];
          }
        }
      }
      if (Needs(b)) {
        Tensor<T>& GB = nodes_[b.id].grad;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const T g = G[i * n + j];
            for (std::size_t p = 0; p < k; ++p) GB[j * k + p] += g * A[i * k + p];
          }
        }
      }
    });
    return c;
  }

  Var Add(Var a, Var b) {
    const Tensor<T>& A = Value(a);
    const Tensor<T>& B = Value(b);
    if (!A.SameShape(B)) {
      throw ShapeError("add: shapes differ " + Tensor<T>::ShapeString(A.shape()) +
                       " vs " + Tensor<T>::ShapeString(B.shape()));
    }
    Tensor<T> out = A;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
    Var c = Record("add", std::move(out), {a, b});
    SetBackward(c, [this, a, b, c]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      for (Var v : {a, b}) {
        if (!Needs(v)) continue;
        Tensor<T>& GV = nodes_[v.id].grad;
        for (std::size_t i = 0; i < G.size(); ++i) GV[i] += G[i];
      }
    });
    return c;
  }

  // Elementwise product.
  Var Mul(Var a, Var b) {
    const Tensor<T>& A = Value(a);
    const Tensor<T>& B = Value(b);
    if (!A.SameShape(B)) {
      throw ShapeError("mul: shapes differ " + Tensor<T>::ShapeString(A.shape()) +
                       " vs " + Tensor<T>::ShapeString(B.shape()));
    }
    Tensor<T> out = A;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
    Var c = Record("mul", std::move(out), {a, b});
    SetBackward(c, [this, a, b, c]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      const Tensor<T>& A = nodes_[a.id].value;
      const Tensor<T>& B = nodes_[b.id].value;
      if (Needs(a)) {
        Tensor<T>& GA = nodes_[a.id].grad;
        for (std::size_t i = 0; i < G.size(); ++i) GA[i] += G[i] * B[i];
      }
      if (Needs(b)) {
        Tensor<T>& GB = nodes_[b.id].grad;
        for (std::size_t i = 0; i < G.size(); ++i) GB[i] += G[i] * A[i];
      }
    });
    return c;
  }

  // Adds a row vector to every row of `a`.
  Var AddRow(Var a, Var row) {
    const Tensor<T>& A = Value(a);
    const Tensor<T>& R = Value(row);
    if (R.size() != A.cols()) {
      throw ShapeError("add_row: bias of " + std::to_string(R.size()) +
                       " values for rows of " + std::to_string(A.cols()));
    }
    Tensor<T> out = A;
    const std::size_t n = A.cols();
    for (std::size_t i = 0; i < A.rows(); ++i) {
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += R[j];
    }
    Var c = Record("add_row", std::move(out), {a, row});
    SetBackward(c, [this, a, row, c, n]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      if (Needs(a)) {
        Tensor<T>& GA = nodes_[a.id].grad;
        for (std::size_t i = 0; i < G.size(); ++i) GA[i] += G[i];
      }
      if (Needs(row)) {
        Tensor<T>& GR = nodes_[row.id].grad;
        for (std::size_t i = 0; i < G.size(); ++i) GR[i % n] += G[i];
      }
    });
    return c;
  }

  Var Scale(Var a, T s) {
    Tensor<T> out = Value(a);
    for (T& v : out.storage()) v *= s;
    Var c = Record("scale", std::move(out), {a});
    SetBackward(c, [this, a, c, s]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      Tensor<T>& GA = nodes_[a.id].grad;
      for (std::size_t i = 0; i < G.size(); ++i) GA[i] += s * G[i];
    });
    return c;
  }

  // Row-wise layer normalization with per-column scale and shift.
  Var LayerNorm(Var x, Var scale, Var shift, T eps = T(1e-5)) {
    const Tensor<T>& X = Value(x);
    const Tensor<T>& S = Value(scale);
    const Tensor<T>& B = Value(shift);
    const std::size_t rows = X.rows(), n = X.cols();
    if (S.size() != n || B.size() != n) {
      throw ShapeError("layer_norm: scale/shift length must equal " +
                       std::to_string(n));
    }
    Tensor<T> out(X.shape());
    Tensor<T> normalized(X.shape());
    std::vector<T> inv_std(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      T mean{0};
      for (std::size_t j = 0; j < n; ++j) mean += X[r * n + j];
      mean /= static_cast<T>(n);
      T var{0};
      for (std::size_t j = 0; j < n; ++j) {
        const T d = X[r * n + j] - mean;
        var += d * d;
      }
      var /= static_cast<T>(n);
      inv_std[r] = T{1} / std::sqrt(var + eps);
      for (std::size_t j = 0; j < n; ++j) {
        const T xh = (X[r * n + j] - mean) * inv_std[r];
        normalized[r * n + j] = xh;
        out[r * n + j] = xh * S[j] + B[j];
      }
    }
    Var c = Record("layer_norm", std::move(out), {x, scale, shift});
    SetBackward(c, [this, x, scale, shift, c, rows, n,
                    normalized = std::move(normalized),
                    inv_std = std::move(inv_std)]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      const Tensor<T>& S = nodes_[scale.id].value;
      if (Needs(scale)) {
        Tensor<T>& GS = nodes_[scale.id].grad;
        for (std::size_t i = 0; i < G.size(); ++i) {
          GS[i % n] += G[i] * normalized[i];
        }
      }
      if (Needs(shift)) {
        Tensor<T>& GB = nodes_[shift.id].grad;
        for (std::size_t i = 0; i < G.size(); ++i) GB[i % n] += G[i];
      }
      if (Needs(x)) {
        Tensor<T>& GX = nodes_[x.id].grad;
        std::vector<T> dxh(n);
        for (std::size_t r = 0; r < rows; ++r) {
          T mean_d{0}, mean_dx{0};
          for (std::size_t j = 0; j < n; ++j) {
            dxh[j] = G[r * n + j] * S[j];
            mean_d += dxh[j];
            mean_dx += dxh[j] * normalized[r * n + j];
          }
          mean_d /= static_cast<T>(n);
          mean_dx /= static_cast<T>(n);
          for (std::size_t j = 0; j < n; ++j) {
            GX[r * n + j] += inv_std[r] * (dxh[j] - mean_d -
                                           normalized[r * n + j] * mean_dx);
          }
        }
      }
    });
    return c;
  }

  // Row-wise softmax with max subtraction.
  Var Softmax(Var x) {
    const Tensor<T>& X = Value(x);
    const std::size_t rows = X.rows(), n = X.cols();
    Tensor<T> out(X.shape());
    for (std::size_t r = 0; r < rows; ++r) {
      T mx = -std::numeric_limits<T>::infinity();
      for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, X[r * n + j]);
      T total{0};
      for (std::size_t j = 0; j < n; ++j) {
        out[r * n + j] = std::exp(X[r * n + j] - mx);
        total += out[r * n + j];
      }
      for (std::size_t j = 0; j < n; ++j) out[r * n + j] /= total;
    }
    Var c = Record("softmax", std::move(out), {x});
    SetBackward(c, [this, x, c, rows, n]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      const Tensor<T>& Y = nodes_[c.id].value;
      Tensor<T>& GX = nodes_[x.id].grad;
      for (std::size_t r = 0; r < rows; ++r) {
        T dot{0};
        for (std::size_t j = 0; j < n; ++j) dot += G[r * n + j] * Y[r * n + j];
        for (std::size_t j = 0; j < n; ++j) {
          GX[r * n + j] += Y[r * n + j] * (G[r * n + j] - dot);
        }
      }
    });
    return c;
  }

  // Exact GELU: x * Phi(x).
  Var Gelu(Var x) {
    const Tensor<T>& X = Value(x);
    Tensor<T> out(X.shape());
    const T inv_sqrt2 = T(1) / std::sqrt(T(2));
    for (std::size_t i = 0; i < X.size(); ++i) {
      out[i] = T(0.5) * X[i] * (T(1) + std::erf(X[i] * inv_sqrt2));
    }
    Var c = Record("gelu", std::move(out), {x});
    SetBackward(c, [this, x, c, inv_sqrt2]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      const Tensor<T>& X = nodes_[x.id].value;
      Tensor<T>& GX = nodes_[x.id].grad;
      const T inv_sqrt_2pi = T(1) / std::sqrt(T(2) * std::numbers::pi_v<T>);
      for (std::size_t i = 0; i < X.size(); ++i) {
        const T cdf = T(0.5) * (T(1) + std::erf(X[i] * inv_sqrt2));
        const T pdf = inv_sqrt_2pi * std::exp(T(-0.5) * X[i] * X[i]);
        GX[i] += G[i] * (cdf + X[i] * pdf);
      }
    });
    return c;
  }

  // Each row divided by its Euclidean norm. A zero row is a NumericError.
  Var L2Normalize(Var x) {
    const Tensor<T>& X = Value(x);
    const std::size_t rows = X.rows(), n = X.cols();
    Tensor<T> out(X.shape());
    std::vector<T> norms(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      T sq{0};
      for (std::size_t j = 0; j < n; ++j) sq += X[r * n + j] * X[r * n + j];
      norms[r] = std::sqrt(sq);
      if (!(norms[r] > T(0))) {
        throw NumericError("l2_normalize: row " + std::to_string(r) +
                           " has zero norm");
      }
      for (std::size_t j = 0; j < n; ++j) out[r * n + j] = X[r * n + j] / norms[r];
    }
    Var c = Record("l2_normalize", std::move(out), {x});
    SetBackward(c, [this, x, c, rows, n, norms = std::move(norms)]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      const Tensor<T>& Y = nodes_[c.id].value;
      Tensor<T>& GX = nodes_[x.id].grad;
      for (std::size_t r = 0; r < rows; ++r) {
        T dot{0};
        for (std::size_t j = 0; j < n; ++j) dot += G[r * n + j] * Y[r * n + j];
        for (std::size_t j = 0; j < n; ++j) {
          GX[r * n + j] += (G[r * n + j] - Y[r * n + j] * dot) / norms[r];
        }
      }
    });
    return c;
  }

  Var ConcatRows(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no inputs");
    const std::size_t n = Value(parts[0]).cols();
    std::size_t rows = 0;
    for (Var p : parts) {
      if (Value(p).cols() != n) {
        throw ShapeError("concat_rows: column counts differ");
      }
      rows += Value(p).rows();
    }
    std::vector<T> data;
    data.reserve(rows * n);
    for (Var p : parts) {
      const auto& v = Value(p).storage();
      data.insert(data.end(), v.begin(), v.end());
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    Var c = Record("concat_rows", Tensor<T>({rows, n}, std::move(data)), inputs);
    SetBackward(c, [this, inputs, c]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      std::size_t offset = 0;
      for (Var p : inputs) {
        const std::size_t count = nodes_[p.id].value.size();
        if (Needs(p)) {
          Tensor<T>& GP = nodes_[p.id].grad;
          for (std::size_t i = 0; i < count; ++i) GP[i] += G[offset + i];
        }
        offset += count;
      }
    });
    return c;
  }

  Var ConcatCols(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no inputs");
    const std::size_t rows = Value(parts[0]).rows();
    std::size_t cols = 0;
    for (Var p : parts) {
      if (Value(p).rows() != rows) {
        throw ShapeError("concat_cols: row counts differ");
      }
      cols += Value(p).cols();
    }
    Tensor<T> out({rows, cols});
    std::size_t offset = 0;
    for (Var p : parts) {
      const Tensor<T>& P = Value(p);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < P.cols(); ++j) {
          out[r * cols + offset + j] = P[r * P.cols() + j];
        }
      }
      offset += P.cols();
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    Var c = Record("concat_cols", std::move(out), inputs);
    SetBackward(c, [this, inputs, c, rows, cols]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      std::size_t offset = 0;
      for (Var p : inputs) {
        const std::size_t pc = nodes_[p.id].value.cols();
        if (Needs(p)) {
          Tensor<T>& GP = nodes_[p.id].grad;
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < pc; ++j) {
              GP[r * pc + j] += G[r * cols + offset + j];
            }
          }
        }
        offset += pc;
      }
    });
    return c;
  }

  Var SliceRows(Var x, std::size_t begin, std::size_t count) {
    const Tensor<T>& X = Value(x);
    if (count == 0 || begin + count > X.rows()) {
      throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " +
                       std::to_string(begin + count) + ") outside " +
                       std::to_string(X.rows()) + " rows");
    }
    const std::size_t n = X.cols();
    std::vector<T> data(X.storage().begin() + begin * n,
                        X.storage().begin() + (begin + count) * n);
    Var c = Record("slice_rows", Tensor<T>({count, n}, std::move(data)), {x});
    SetBackward(c, [this, x, c, begin, n]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      Tensor<T>& GX = nodes_[x.id].grad;
      for (std::size_t i = 0; i < G.size(); ++i) GX[begin * n + i] += G[i];
    });
    return c;
  }

  Var SliceCols(Var x, std::size_t begin, std::size_t count) {
    const Tensor<T>& X = Value(x);
    if (count == 0 || begin + count > X.cols()) {
      throw ShapeError("slice_cols: range [" + std::to_string(begin) + ", " +
                       std::to_string(begin + count) + ") outside " +
                       std::to_string(X.cols()) + " columns");
    }
    const std::size_t rows = X.rows(), n = X.cols();
    Tensor<T> out({rows, count});
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < count; ++j) {
        out[r * count + j] = X[r * n + begin + j];
      }
    }
    Var c = Record("slice_cols", std::move(out), {x});
    SetBackward(c, [this, x, c, begin, count, rows, n]() {
      const Tensor<T>& G = nodes_[c.id].grad;
      Tensor<T>& GX = nodes_[x.id].grad;
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < count; ++j) {
          GX[r * n + begin + j] += G[r * count + j];
        }
      }
    });
    return c;
  }

  Var Sum(Var x) {
    const Tensor<T>& X = Value(x);
    T total{0};
    for (T v : X.storage()) total += v;
    Var c = Record("sum", Tensor<T>::Scalar(total), {x});
    SetBackward(c, [this, x, c]() {
      const T g = nodes_[c.id].grad[0];
      for (T& v : nodes_[x.id].grad.storage()) v += g;
    });
    return c;
  }

  Var Mean(Var x) {
    const std::size_t n = Value(x).size();
    if (n == 0) throw ShapeError("mean: empty input");
    return Scale(Sum(x), T(1) / static_cast<T>(n));
  }

  // Mean over rows of -log softmax(logits[r])[targets[r]]. Entries flagged
  // in `excluded` (row-major, same size as logits, or empty for none) are
  // left out of the normalizer and receive no gradient.
  Var SoftmaxCrossEntropy(Var logits, std::vector<std::size_t> targets,
                          std::vector<std::uint8_t> excluded = {}) {
    const Tensor<T>& Z = Value(logits);
    const std::size_t rows = Z.rows(), n = Z.cols();
    if (targets.size() != rows) {
      throw ShapeError("softmax_cross_entropy: " + std::to_string(targets.size()) +
                       " targets for " + std::to_string(rows) + " rows");
    }
    if (!excluded.empty() && excluded.size() != Z.size()) {
      throw ShapeError("softmax_cross_entropy: exclusion mask size mismatch");
    }
    auto is_excluded = [&excluded, n](std::size_t r, std::size_t j) {
      return !excluded.empty() && excluded[r * n + j] != 0;
    };
    Tensor<T> probs(Z.shape());
    T loss{0};
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t t = targets[r];
      if (t >= n || is_excluded(r, t)) {
        throw ShapeError("softmax_cross_entropy: invalid target in row " +
                         std::to_string(r));
      }
      T mx = -std::numeric_limits<T>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (!is_excluded(r, j)) mx = std::max(mx, Z[r * n + j]);
      }
      T total{0};
      for (std::size_t j = 0; j < n; ++j) {
        if (is_excluded(r, j)) continue;
        probs[r * n + j] = std::exp(Z[r * n + j] - mx);
        total += probs[r * n + j];
      }
      for (std::size_t j = 0; j < n; ++j) probs[r * n + j] /= total;
      loss += (mx + std::log(total)) - Z[r * n + t];
    }
    loss /= static_cast<T>(rows);
    Var c = Record("softmax_cross_entropy", Tensor<T>::Scalar(loss), {logits});
    SetBackward(c, [this, logits, c, rows, n, targets = std::move(targets),
                    probs = std::move(probs)]() {
      const T g = nodes_[c.id].grad[0] / static_cast<T>(rows);
      Tensor<T>& GZ = nodes_[logits.id].grad;
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < n; ++j) {
          GZ[r * n + j] += g * probs[r * n + j];
        }
        GZ[r * n + targets[r]] -= g;
      }
    });
    return c;
  }

  // Reverse pass from a single-element node. Parameter gradients are added
  // to the bound ParamSet and flagged as populated.
  void Backward(Var loss) {
    if (Value(loss).size() != 1) {
      throw ShapeError("backward: target must hold exactly one value");
    }
    for (Node& node : nodes_) {
      if (node.requires_grad) {
        node.grad = Tensor<T>(node.value.shape());
      } else {
        node.grad = Tensor<T>();
      }
    }
    if (!nodes_[loss.id].requires_grad) return;
    nodes_[loss.id].grad[0] = T(1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& node = nodes_[i];
      if (node.requires_grad && node.backward) node.backward();
    }
    if (grad_sink_ == nullptr) return;
    for (const auto& [index, id] : param_nodes_) {
      auto& entry = grad_sink_->at(index);
      const Tensor<T>& g = nodes_[id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) entry.grad[i] += g[i];
      entry.has_grad = true;
    }
  }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    std::ptrdiff_t param_index = -1;
    std::function<void()> backward;
  };

  static void RequireMatrix(const char* op, const Tensor<T>& t) {
    if (t.rank() != 1 && t.rank() != 2) {
      throw ShapeError(std::string(op) + ": expected a vector or matrix, got " +
                       Tensor<T>::ShapeString(t.shape()));
    }
  }

  Var Push(Tensor<T> value, bool requires_grad) {
    nodes_.push_back(Node{std::move(value), Tensor<T>(), requires_grad, -1, {}});
    return Var{nodes_.size() - 1};
  }

  Var Record(const char* op, Tensor<T> value, std::initializer_list<Var> inputs) {
    return Record(op, std::move(value), std::vector<Var>(inputs));
  }

  Var Record(const char* op, Tensor<T> value, const std::vector<Var>& inputs) {
    if (!value.AllFinite()) {
      throw NumericError(std::string(op) + ": produced a non-finite value");
    }
    bool reached = false;
    for (Var v : inputs) reached = reached || nodes_.at(v.id).requires_grad;
    return Push(std::move(value), reached);
  }

  void SetBackward(Var v, std::function<void()> fn) {
    if (nodes_[v.id].requires_grad) nodes_[v.id].backward = std::move(fn);
  }

  bool Needs(Var v) const { return nodes_[v.id].requires_grad; }

  const ParamSet<T>* params_ = nullptr;
  ParamSet<T>* grad_sink_ = nullptr;
  std::vector<Node> nodes_;
  std::map<std::size_t, std::size_t> param_nodes_;
};

// A loss graph builds its forward pass on a tape bound to the parameters and
// returns the scalar loss node.
template <typename T>
using LossGraph = std::function<Var(Tape<T>&)>;

// Forward plus reverse pass. Gradients are written (not accumulated) into
// `params`; parameters the loss does not reach keep has_grad == false.
template <typename T>
T EvaluateWithGradients(const LossGraph<T>& graph, ParamSet<T>& params) {
  params.ZeroGrad();
  Tape<T> tape(&params);
  Var loss = graph(tape);
  tape.Backward(loss);
  return tape.Value(loss)[0];
}

// Forward pass only.
template <typename T>
T EvaluateLoss(const LossGraph<T>& graph, ParamSet<T>& params) {
  Tape<T> tape(&params);
  Var loss = graph(tape);
  if (tape.Value(loss).size() != 1) {
    throw ShapeError("loss graph must return a single value");
  }
  return tape.Value(loss)[0];
}

// Central-difference gradient estimate for every parameter coordinate,
// (f(p + eps) - f(p - eps)) / (2 eps). 64-bit only.
std::vector<Tensor<double>> FiniteDiffGradient(const LossGraph<double>& graph,
                                               ParamSet<double>& params,
                                               double epsilon);

// Largest |a - b| / max(|a|, |b|, floor) over all coordinates.
double MaxRelativeError(std::span<const Tensor<double>> analytic,
                        std::span<const Tensor<double>> numeric,
                        double floor = 1e-8);

}  // namespace ovc

#endif  // OVC_AUTODIFF_HPP_
