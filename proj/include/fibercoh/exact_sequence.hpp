#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fibercoh/error.hpp"
#include "fibercoh/graded.hpp"

namespace fibercoh {

inline constexpr Rank kUnbounded = std::numeric_limits<Rank>::max() / 4;

struct Interval {
  Rank lo = 0;
  Rank hi = kUnbounded;
  bool is_point() const { return lo == hi; }
  bool contains(Rank v) const { return lo <= v && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline std::string to_string(const Interval& i) {
  return "[" + std::to_string(i.lo) + "," + (i.hi >= kUnbounded ? "inf" : std::to_string(i.hi)) + "]";
}

/// Terms of a long exact sequence T_0 -> T_1 -> ... -> T_{N-1}, exact at every term,
/// with zero maps into T_0 and out of T_{N-1}.
struct ExactSequenceProblem {
  enum class Kind { known, unknown, zero };
  struct Term {
    Kind kind;
    Rank value;
    std::string label;
  };
  std::vector<Term> terms;
  /// map_ranks[k] is the rank of T_k -> T_{k+1}.
  std::map<std::size_t, Rank> map_ranks;

  ExactSequenceProblem& known(std::string label, Rank v) {
    terms.push_back({Kind::known, v, std::move(label)});
    return *this;
  }
  ExactSequenceProblem& unknown(std::string label) {
    terms.push_back({Kind::unknown, 0, std::move(label)});
    return *this;
  }
  ExactSequenceProblem& zero(std::string label = "0") {
    terms.push_back({Kind::zero, 0, std::move(label)});
    return *this;
  }
  /// Rank of the map leaving the most recently added term.
  ExactSequenceProblem& rank_out(Rank r) {
    map_ranks[terms.size() - 1] = r;
    return *this;
  }
};

struct ExactSequenceSolution {
  std::vector<Interval> terms;
  std::vector<Interval> maps;
  std::vector<std::string> labels;

  Interval at(const std::string& label) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == label) return terms[k];
    throw Error(ErrorKind::invalid_input, "no term labelled " + label);
  }
};

namespace detail {
inline Rank sat_add(Rank a, Rank b) { return (a >= kUnbounded || b >= kUnbounded) ? kUnbounded : a + b; }
inline Rank sat_sub_hi(Rank hi, Rank lo) { return hi >= kUnbounded ? kUnbounded : hi - lo; }
}  // namespace detail

/// Interval propagation of dim T_k = rank(in) + rank(out) to a fixed point.
/// The constraint graph is a path, so the fixed point is the exact projection.
inline ExactSequenceSolution solve_les(const ExactSequenceProblem& p) {
  using detail::sat_add;
  using detail::sat_sub_hi;
  const std::size_t n = p.terms.size();
  if (n == 0) return {};
  for (std::size_t k : {std::size_t{0}, n - 1})
    if (p.terms[k].kind == ExactSequenceProblem::Kind::unknown)
      throw Error(ErrorKind::invalid_input, "sequence must end in a zero or a known term");

  ExactSequenceSolution s;
  s.terms.resize(n);
  s.maps.resize(n + 1);  // maps[k] enters T_k; maps[n] leaves T_{n-1}
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = p.terms[k];
    s.labels.push_back(t.label);
    if (t.kind == ExactSequenceProblem::Kind::known && t.value < 0)
      throw Error(ErrorKind::invalid_input, "negative dimension for " + t.label);
    if (t.kind == ExactSequenceProblem::Kind::unknown) s.terms[k] = {0, kUnbounded};
    else s.terms[k] = {t.value, t.value};
  }
  s.maps[0] = {0, 0};
  s.maps[n] = {0, 0};
  for (std::size_t k = 1; k < n; ++k) s.maps[k] = {0, kUnbounded};
  for (auto [k, r] : p.map_ranks) {
    if (k + 1 >= n || r < 0) throw Error(ErrorKind::invalid_input, "map rank index out of range");
    s.maps[k + 1] = {r, r};
  }

  auto tighten = [](Interval& v, Rank lo, Rank hi) {
    bool changed = false;
    if (lo > v.lo) v.lo = lo, changed = true;
    if (hi < v.hi) v.hi = hi, changed = true;
    return changed;
  };
  bool changed = true;
  for (int sweep = 0; changed; ++sweep) {
    if (sweep > 4 * static_cast<int>(n) + 16)
      throw Error(ErrorKind::inconsistent_sequence, "propagation did not settle");
    changed = false;
    for (std::size_t k = 0; k < n; ++k) {
      Interval& d = s.terms[k];
      Interval& a = s.maps[k];
      Interval& b = s.maps[k + 1];
      changed |= tighten(d, sat_add(a.lo, b.lo), sat_add(a.hi, b.hi));
      changed |= tighten(a, std::max<Rank>(0, d.lo - std::min(b.hi, d.lo)), sat_sub_hi(d.hi, b.lo));
      changed |= tighten(b, std::max<Rank>(0, d.lo - std::min(a.hi, d.lo)), sat_sub_hi(d.hi, a.lo));
      for (const Interval* v : {&d, &a, &b})
        if (v->lo > v->hi)
          throw Error(ErrorKind::inconsistent_sequence, "no solution at term " + p.terms[k].label);
    }
  }
  return s;
}

}  // namespace fibercoh
