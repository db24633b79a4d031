#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "fibercoh/error.hpp"

namespace fibercoh {

using Rank = std::int64_t;

/// Ranks of a graded rational vector space, indexed from degree 0.
/// Trailing zeros are trimmed, so equal families compare equal.
class GradedDim {
 public:
  GradedDim() = default;
  GradedDim(std::initializer_list<Rank> v) : dims_(v) { normalize(); }
  explicit GradedDim(std::vector<Rank> v) : dims_(std::move(v)) { normalize(); }

  Rank operator[](int q) const {
    return q >= 0 && q < static_cast<int>(dims_.size()) ? dims_[q] : 0;
  }
  /// Highest degree with a nonzero entry, -1 for the zero family.
  int top() const { return static_cast<int>(dims_.size()) - 1; }
  bool is_zero() const { return dims_.empty(); }
  const std::vector<Rank>& dims() const { return dims_; }
  Rank total() const { return std::accumulate(dims_.begin(), dims_.end(), Rank{0}); }
  Rank euler() const {
    Rank e = 0;
    for (std::size_t q = 0; q < dims_.size(); ++q) e += (q % 2 ? -1 : 1) * dims_[q];
    return e;
  }
  /// Entries 0..len-1, zero padded.
  std::vector<Rank> padded(int len) const {
    std::vector<Rank> out(std::max(len, 0), 0);
    for (int q = 0; q < len && q <= top(); ++q) out[q] = dims_[q];
    return out;
  }

  friend bool operator==(const GradedDim&, const GradedDim&) = default;

 private:
  void normalize() {
    for (Rank r : dims_)
      if (r < 0) throw Error(ErrorKind::invalid_input, "negative rank in graded dimension");
    while (!dims_.empty() && dims_.back() == 0) dims_.pop_back();
  }
  std::vector<Rank> dims_;
};

inline std::string to_string(const GradedDim& a) {
  std::string s = "(";
  for (int q = 0; q <= a.top(); ++q) s += (q ? "," : "") + std::to_string(a[q]);
  return s + ")";
}

inline std::ostream& operator<<(std::ostream& os, const GradedDim& a) { return os << to_string(a); }

inline GradedDim operator+(const GradedDim& a, const GradedDim& b) {
  std::vector<Rank> v(std::max(a.top(), b.top()) + 1);
  for (int q = 0; q < static_cast<int>(v.size()); ++q) v[q] = a[q] + b[q];
  return GradedDim(std::move(v));
}

/// Degree shift: result_q = a_{q-k}.
inline GradedDim shift(const GradedDim& a, int k) {
  if (a.is_zero()) return a;
  std::vector<Rank> v(std::max(a.top() + k + 1, 0), 0);
  for (int q = 0; q < static_cast<int>(v.size()); ++q) v[q] = a[q - k];
  return GradedDim(std::move(v));
}

/// Keeps degrees q <= last, zero elsewhere.
inline GradedDim truncate_above(const GradedDim& a, int last) {
  std::vector<Rank> v(std::max(std::min(a.top(), last) + 1, 0));
  for (int q = 0; q < static_cast<int>(v.size()); ++q) v[q] = a[q];
  return GradedDim(std::move(v));
}

inline bool entrywise_le(const GradedDim& a, const GradedDim& b) {
  for (int q = 0; q <= a.top(); ++q)
    if (a[q] > b[q]) return false;
  return true;
}

inline GradedDim kunneth(const GradedDim& a, const GradedDim& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rank> v(a.top() + b.top() + 1, 0);
  for (int i = 0; i <= a.top(); ++i)
    for (int j = 0; j <= b.top(); ++j) v[i + j] += a[i] * b[j];
  return GradedDim(std::move(v));
}

/// result_q = a_{m-q}.
inline GradedDim poincare_dual(const GradedDim& a, int m) {
  if (a.top() > m)
    throw Error(ErrorKind::invalid_input,
                "degree " + std::to_string(a.top()) + " exceeds dimension " + std::to_string(m));
  std::vector<Rank> v(m + 1, 0);
  for (int q = 0; q <= m; ++q) v[q] = a[m - q];
  return GradedDim(std::move(v));
}

/// Binds invariant dimensions of a group action to the ambient family.
inline GradedDim invariants_under_action(const GradedDim& a, const GradedDim& invariant_dims) {
  for (int q = 0; q <= invariant_dims.top(); ++q)
    if (invariant_dims[q] > a[q])
      throw Error(ErrorKind::invariants_exceed_ambient,
                  "degree " + std::to_string(q) + ": " + std::to_string(invariant_dims[q]) + " > " +
                      std::to_string(a[q]));
  return invariant_dims;
}

}  // namespace fibercoh
