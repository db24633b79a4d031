#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fibercoh/error.hpp"

namespace fibercoh {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational half(long m) { return rat(m, 2); }

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational parse_rational(const std::string& s) {
  Rational r;
  if (s.empty() || r.set_str(s, 10) != 0 || r.get_den() == 0)
    throw Error(ErrorKind::invalid_input, "bad rational '" + s + "'");
  r.canonicalize();
  return r;
}

/// r + s*eps with eps a formal positive infinitesimal; ordered lexicographically in (r, s).
struct WeightEntry {
  Rational r{0};
  std::int64_t s = 0;

  static WeightEntry eps(std::int64_t k = 1) { return {rat(0), k}; }
  static WeightEntry of(Rational r, std::int64_t s = 0) { return {r, s}; }

  friend bool operator==(const WeightEntry& a, const WeightEntry& b) { return a.r == b.r && a.s == b.s; }
  friend std::strong_ordering operator<=>(const WeightEntry& a, const WeightEntry& b) {
    if (a.r < b.r) return std::strong_ordering::less;
    if (b.r < a.r) return std::strong_ordering::greater;
    return a.s <=> b.s;
  }
  friend WeightEntry operator+(WeightEntry a, const Rational& t) { return {a.r + t, a.s}; }
  friend WeightEntry operator-(WeightEntry a, const Rational& t) { return {a.r - t, a.s}; }
  friend WeightEntry operator-(const WeightEntry& a) { return {-a.r, -a.s}; }
  /// Sign of the entry: -1, 0 or +1.
  int sign() const {
    if (int c = sgn(r)) return c > 0 ? 1 : -1;
    return s == 0 ? 0 : (s > 0 ? 1 : -1);
  }
};

inline bool operator<(const WeightEntry& a, const Rational& t) { return a < WeightEntry{t, 0}; }

inline std::string to_string(const WeightEntry& w) {
  if (w.s == 0) return to_string(w.r);
  std::string e = (w.s == 1 ? "" : w.s == -1 ? "-" : std::to_string(w.s)) + "eps";
  if (sgn(w.r) == 0) return e;
  return to_string(w.r) + (w.s > 0 ? "+" : "") + e;
}

/// One entry per hypersurface id.
using Weight = std::map<std::string, WeightEntry>;

inline Weight uniform_weight(const std::vector<std::string>& ids, WeightEntry e) {
  Weight w;
  for (auto& id : ids) w[id] = e;
  return w;
}

inline Weight negate(const Weight& a) {
  Weight out;
  for (auto& [k, v] : a) out[k] = -v;
  return out;
}

/// Each entry a_i becomes a_i + (m/2 - q).
inline Weight qfb_to_qfc_shift(const Weight& a, int q, int m) {
  Weight out;
  for (auto& [k, v] : a) out[k] = v + (half(m) - rat(q));
  return out;
}

inline WeightEntry qfb_to_qfc_shift(const WeightEntry& a, int q, int m) { return a + (half(m) - rat(q)); }

/// Integer function on codimensions 2..max_codim.
class Perversity {
 public:
  Perversity() = default;
  Perversity(std::string name, std::vector<int> from_codim_two)
      : name_(std::move(name)), values_(std::move(from_codim_two)) {}

  static Perversity lower_middle(int max_codim = 32) {
    return build("lower_middle", max_codim, [](int k) { return (k - 2) / 2; });
  }
  static Perversity upper_middle(int max_codim = 32) {
    return build("upper_middle", max_codim, [](int k) { return (k - 1) / 2; });
  }
  static Perversity zero(int max_codim = 32) {
    return build("zero", max_codim, [](int) { return 0; });
  }
  static Perversity top(int max_codim = 32) {
    return build("top", max_codim, [](int k) { return k - 2; });
  }
  static Perversity named(const std::string& name, int max_codim = 32) {
    if (name == "lower_middle") return lower_middle(max_codim);
    if (name == "upper_middle") return upper_middle(max_codim);
    if (name == "zero") return zero(max_codim);
    if (name == "top") return top(max_codim);
    throw Error(ErrorKind::invalid_input, "unknown perversity '" + name + "'");
  }

  int operator()(int k) const {
    if (k < 2 || k - 2 >= static_cast<int>(values_.size()))
      throw Error(ErrorKind::perversity_range, "codimension " + std::to_string(k) + " for " + name_);
    return values_[k - 2];
  }
  bool defined_at(int k) const { return k >= 2 && k - 2 < static_cast<int>(values_.size()); }
  int max_codim() const { return static_cast<int>(values_.size()) + 1; }
  const std::string& name() const { return name_; }
  const std::vector<int>& values() const { return values_; }

  /// Goresky-MacPherson conditions: p(2) = 0 and p(k) <= p(k+1) <= p(k) + 1.
  bool is_classical() const {
    if (values_.empty() || values_[0] != 0) return false;
    for (std::size_t i = 1; i < values_.size(); ++i)
      if (values_[i] < values_[i - 1] || values_[i] > values_[i - 1] + 1) return false;
    return true;
  }

 private:
  template <class F>
  static Perversity build(const char* name, int max_codim, F f) {
    std::vector<int> v;
    for (int k = 2; k <= max_codim; ++k) v.push_back(f(k));
    return Perversity(name, std::move(v));
  }
  std::string name_ = "custom";
  std::vector<int> values_;
};

/// Complement q(k) = k - 2 - p(k) on the range where p is defined.
inline Perversity complement(const Perversity& p) {
  std::vector<int> v;
  for (int k = 2; k <= p.max_codim(); ++k) v.push_back(k - 2 - p(k));
  return Perversity("complement_of_" + p.name(), std::move(v));
}

/// Every Goresky-MacPherson perversity on codimensions 2..max_codim.
inline std::vector<Perversity> classical_perversities(int max_codim) {
  std::vector<Perversity> out;
  const int steps = std::max(0, max_codim - 2);
  for (unsigned mask = 0; mask < (1u << steps); ++mask) {
    std::vector<int> v{0};
    for (int b = 0; b < steps; ++b) v.push_back(v.back() + static_cast<int>(mask >> b & 1));
    out.emplace_back("gm" + std::to_string(mask), std::move(v));
  }
  return out;
}

/// p(m+1) - (m-2)/2 - eps.
inline WeightEntry perversity_to_weight(const Perversity& p, int m_i) {
  if (m_i < 1) throw Error(ErrorKind::invalid_input, "fiber dimension must be positive");
  return {rat(p(m_i + 1)) - rat(m_i - 2, 2), -1};
}

}  // namespace fibercoh
