// Copyright 2026 The Supmod Authors.
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

#ifndef SUPMOD_SET_FUNCTION_HPP_
#define SUPMOD_SET_FUNCTION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace supmod {

/// Membership mask over a ground set; nonzero means "in the set".
using SetMask = std::vector<std::uint8_t>;

inline SetMask mask_from_bits(std::uint64_t bits, std::size_t n) {
  SetMask m(n, 0);
  for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<std::uint8_t>((bits >> i) & 1U);
  return m;
}

inline std::vector<std::size_t> mask_members(std::span<const std::uint8_t> mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

/// Black-box set function f: 2^V -> R over V = {0..n-1}.
class SetFunctionOracle {
 public:
  using Evaluator = std::function<double(std::span<const std::uint8_t>)>;

  SetFunctionOracle() = default;
  SetFunctionOracle(std::size_t n, Evaluator f) : n_(n), f_(std::move(f)) {}

  std::size_t size() const { return n_; }

  double operator()(std::span<const std::uint8_t> mask) const {
    if (mask.size() != n_) {
      throw std::invalid_argument("SetFunctionOracle: mask size " + std::to_string(mask.size()) +
                                  " != ground set size " + std::to_string(n_));
    }
    if (memo_) {
      std::string key(mask.begin(), mask.end());
      auto it = memo_->find(key);
      if (it != memo_->end()) return it->second;
      double v = f_(mask);
      memo_->emplace(std::move(key), v);
      return v;
    }
    return f_(mask);
  }

  double evaluate_members(std::span<const std::size_t> members) const {
    SetMask m(n_, 0);
    for (std::size_t i : members) m.at(i) = 1;
    return (*this)(m);
  }

  /// f(S) - f(empty), so that the result is normalized.
  SetFunctionOracle normalized() const {
    SetMask empty(n_, 0);
    const double offset = (*this)(empty);
    auto inner = *this;
    return {n_, [inner, offset](std::span<const std::uint8_t> m) { return inner(m) - offset; }};
  }

  /// -f
  SetFunctionOracle negated() const {
    auto inner = *this;
    return {n_, [inner](std::span<const std::uint8_t> m) { return -inner(m); }};
  }

  /// Copies share one cache; intended for correctness tests, not timing.
  void enable_memoization() {
    if (!memo_) memo_ = std::make_shared<std::unordered_map<std::string, double>>();
  }
  bool memoized() const { return static_cast<bool>(memo_); }

 private:
  std::size_t n_ = 0;
  Evaluator f_;
  std::shared_ptr<std::unordered_map<std::string, double>> memo_;
};

}  // namespace supmod

#endif  // SUPMOD_SET_FUNCTION_HPP_
