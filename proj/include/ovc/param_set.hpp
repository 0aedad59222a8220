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

#ifndef OVC_PARAM_SET_HPP_
#define OVC_PARAM_SET_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/error.hpp"
#include "ovc/tensor.hpp"

namespace ovc {

// Named trainable parameters, kept in declaration order. Each parameter
// carries a gradient slot of the same shape and a flag recording whether the
// last backward pass reached it.
template <typename T>
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
    bool has_grad = false;
  };

  std::size_t Add(std::string name, Tensor<T> value) {
    if (index_.count(name) != 0) {
      throw ConfigError("ParamSet: duplicate parameter name '" + name + "'");
    }
    Tensor<T> grad(value.shape());
    index_.emplace(name, entries_.size());
    entries_.push_back(Entry{std::move(name), std::move(value),
                             std::move(grad), false});
    return entries_.size() - 1;
  }

  std::size_t size() const { return entries_.size(); }

  std::size_t IndexOf(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
      throw LookupError("ParamSet: unknown parameter '" + std::string(name) +
                        "'");
    }
    return it->second;
  }

  bool Contains(std::string_view name) const {
    return index_.count(std::string(name)) != 0;
  }

  Entry& at(std::size_t i) { return entries_[i]; }
  const Entry& at(std::size_t i) const { return entries_[i]; }
  Entry& at(std::string_view name) { return entries_[IndexOf(name)]; }
  const Entry& at(std::string_view name) const {
    return entries_[IndexOf(name)];
  }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Total number of scalar parameters.
  std::size_t ScalarCount() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

  void ZeroGrad() {
    for (auto& e : entries_) {
      e.grad.Fill(T{0});
      e.has_grad = false;
    }
  }

  template <typename U>
  ParamSet<U> Cast() const {
    ParamSet<U> out;
    for (const auto& e : entries_) out.Add(e.name, e.value.template Cast<U>());
    return out;
  }

  friend bool operator==(const ParamSet& a, const ParamSet& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      if (a.entries_[i].name != b.entries_[i].name ||
          !(a.entries_[i].value == b.entries_[i].value)) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace ovc

#endif  // OVC_PARAM_SET_HPP_
