#pragma once

#include <functional>
#include <optional>
#include <string>

#include "fibercoh/error.hpp"
#include "fibercoh/graded.hpp"
#include "fibercoh/weight.hpp"

namespace fibercoh {

/// Boolean hypothesis together with where it came from.
struct Flag {
  bool value = false;
  std::string source;
};

/// Degrees q in [0, m] for which a = m/2 - q + 1 exactly; the cone model is undefined there.
inline std::optional<int> forbidden_degree(int m_i, const WeightEntry& a) {
  if (a.s != 0) return std::nullopt;
  for (int q = 0; q <= m_i; ++q)
    if (a.r == half(m_i) - rat(q) + rat(1)) return q;
  return std::nullopt;
}

/// True when degree q survives on a cone with fiber dimension m_i: q < m_i/2 - a_i.
inline bool cone_keeps(int q, int m_i, const WeightEntry& a) {
  return a < half(m_i) - rat(q);
}

inline GradedDim cone_local_model(const GradedDim& z, int m_i, const WeightEntry& a) {
  if (auto q = forbidden_degree(m_i, a))
    throw Error(ErrorKind::non_generic_weight,
                "weight " + to_string(a) + " at fiber dimension " + std::to_string(m_i) + ", degree " +
                    std::to_string(*q));
  std::vector<Rank> v(std::max(z.top() + 1, 0), 0);
  for (int q = 0; q <= z.top(); ++q)
    if (cone_keeps(q, m_i, a)) v[q] = z[q];
  return GradedDim(std::move(v));
}

/// Last kept degree of the intersection-cohomology cone rule: m - 1 - p(m+1).
inline int ic_cone_cutoff(const Perversity& p, int m) { return m - 1 - p(m + 1); }

inline GradedDim ic_cone_model(const GradedDim& link, int m, const Perversity& p) {
  return truncate_above(link, ic_cone_cutoff(p, m));
}

/// Cylindrical-end model: absolute tables for negative weight, compact for positive.
inline GradedDim b_local_model(const GradedDim& z_abs, const GradedDim& z_cpt, const WeightEntry& a) {
  switch (a.sign()) {
    case -1: return z_abs;
    case 1: return z_cpt;
    default: throw Error(ErrorKind::weight_zero_unsupported, "");
  }
}

/// result_q = wh(w - 1/2)_q + wh(w + 1/2)_{q-1}.
inline GradedDim circle_kunneth(const std::function<GradedDim(const WeightEntry&)>& wh, const WeightEntry& w) {
  GradedDim below = wh(w - rat(1, 2));
  GradedDim above = wh(w + rat(1, 2));
  return below + shift(above, 1);
}

/// The degrees q with q - 1 < m/2 - a <= q, i.e. where the cone cutoff sits.
inline std::optional<int> gate_degree(int m_i, const WeightEntry& a) {
  for (int q = 0; q <= m_i; ++q)
    if (!cone_keeps(q, m_i, a) && cone_keeps(q - 1, m_i, a)) return q;
  return std::nullopt;
}

/// What is known about the fiber whose natural map into absolute cohomology is being gated.
struct FiberContext {
  int dim = 0;
  bool closed = false;
  bool matches_absolute = false;
  bool depth_one_rhs_boundary = false;
  /// Sign of the weight along the fiber's own boundary, 0 if unknown or mixed.
  int boundary_sign = 0;
};

enum class GateVerdict { pass, fail, unknown };

struct GateResult {
  GateVerdict verdict;
  std::string reason;
};

inline const char* to_string(GateVerdict v) {
  return v == GateVerdict::pass ? "pass" : v == GateVerdict::fail ? "fail" : "unknown";
}

/// Decides whether WH^q(Z) -> H^q(Z) is known to be injective.
inline GateResult injectivity_gate(const GradedDim& z_wh, const GradedDim& z_abs,
                                   const std::optional<Flag>& flag, int q, const FiberContext& ctx = {}) {
  if (q < 0) throw Error(ErrorKind::invalid_input, "negative degree");
  if (flag) {
    if (flag->value) return {GateVerdict::pass, "flag: " + flag->source};
    return {GateVerdict::fail, "flag false: " + flag->source};
  }
  if (z_wh[q] == 0) return {GateVerdict::pass, "zero source"};
  if (ctx.closed) return {GateVerdict::pass, "closed fiber"};
  if (ctx.matches_absolute && z_wh == z_abs) return {GateVerdict::pass, "fiber matches absolute cohomology"};
  if (ctx.depth_one_rhs_boundary && ctx.boundary_sign != 0 && !(ctx.boundary_sign > 0 && q == ctx.dim))
    return {GateVerdict::pass, "cylindrical end over rational homology sphere"};
  return {GateVerdict::unknown, "no rule applies"};
}

}  // namespace fibercoh
