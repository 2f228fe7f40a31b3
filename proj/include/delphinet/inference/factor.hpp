#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <vector>

#include "delphinet/error.hpp"

namespace delphinet::inference {

struct FactorLimits {
  std::size_t max_entries = std::size_t{1} << 26;
  const std::atomic<bool>* cancel = nullptr;

  void check(std::size_t entries) const {
    if (entries > max_entries) {
      throw Error(ErrorCode::ResourceLimit, "intermediate factor with " + std::to_string(entries) +
                                                " entries exceeds the configured limit");
    }
    if (cancel && cancel->load(std::memory_order_relaxed)) {
      throw Error(ErrorCode::ResourceLimit, "evaluation cancelled");
    }
  }
};

/// Dense non-negative table over `scope`, row-major with the last scope
/// variable varying fastest. Size is always the product of `cards`.
struct Factor {
  std::vector<std::size_t> scope;
  std::vector<std::size_t> cards;
  std::vector<double> table{1.0};

  std::size_t size() const { return table.size(); }

  bool has(std::size_t var) const { return std::find(scope.begin(), scope.end(), var) != scope.end(); }

  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(scope.size(), 1);
    for (std::size_t i = scope.size(); i-- > 1;) s[i - 1] = s[i] * cards[i];
    return s;
  }
};

namespace detail {

/// Stride of each `scope` variable inside `f`, zero where `f` lacks it.
inline std::vector<std::size_t> strides_in(const Factor& f, const std::vector<std::size_t>& scope) {
  auto own = f.strides();
  std::vector<std::size_t> out(scope.size(), 0);
  for (std::size_t i = 0; i < scope.size(); ++i) {
    auto it = std::find(f.scope.begin(), f.scope.end(), scope[i]);
    if (it != f.scope.end()) out[i] = own[static_cast<std::size_t>(it - f.scope.begin())];
  }
  return out;
}

}  // namespace detail

inline Factor multiply(const Factor& a, const Factor& b, const FactorLimits& limits) {
  Factor out;
  out.scope = a.scope;
  out.cards = a.cards;
  for (std::size_t i = 0; i < b.scope.size(); ++i) {
    if (!a.has(b.scope[i])) {
      out.scope.push_back(b.scope[i]);
      out.cards.push_back(b.cards[i]);
    }
  }
  std::size_t total = 1;
  for (auto k : out.cards) {
    limits.check(total * k);
    total *= k;
  }
  out.table.assign(total, 0.0);
  auto sa = detail::strides_in(a, out.scope);
  auto sb = detail::strides_in(b, out.scope);
  std::vector<std::size_t> x(out.scope.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t cell = 0; cell < total; ++cell) {
    out.table[cell] = a.table[ia] * b.table[ib];
    for (std::size_t i = out.scope.size(); i-- > 0;) {
      if (++x[i] < out.cards[i]) {
        ia += sa[i];
        ib += sb[i];
        break;
      }
      ia -= sa[i] * (out.cards[i] - 1);
      ib -= sb[i] * (out.cards[i] - 1);
      x[i] = 0;
    }
  }
  return out;
}

inline Factor sum_out(const Factor& f, std::size_t var) {
  auto it = std::find(f.scope.begin(), f.scope.end(), var);
  if (it == f.scope.end()) return f;
  std::size_t k = static_cast<std::size_t>(it - f.scope.begin());
  Factor out;
  for (std::size_t i = 0; i < f.scope.size(); ++i) {
    if (i == k) continue;
    out.scope.push_back(f.scope[i]);
    out.cards.push_back(f.cards[i]);
  }
  std::size_t inner = f.strides()[k];
  std::size_t card = f.cards[k];
  std::size_t outer = f.table.size() / (inner * card);
  out.table.assign(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t j = 0; j < card; ++j) {
      const double* src = &f.table[(o * card + j) * inner];
      double* dst = &out.table[o * inner];
      for (std::size_t in = 0; in < inner; ++in) dst[in] += src[in];
    }
  }
  return out;
}

}  // namespace delphinet::inference
