#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "fibercoh/error.hpp"
#include "fibercoh/exact_sequence.hpp"
#include "fibercoh/graded.hpp"
#include "fibercoh/hilbert.hpp"
#include "fibercoh/local_models.hpp"
#include "fibercoh/poset.hpp"
#include "fibercoh/report.hpp"
#include "fibercoh/spectral.hpp"
#include "fibercoh/weight.hpp"

namespace fibercoh {

inline constexpr const char* kAbsolute = "absolute";
inline constexpr const char* kCompact = "compact";
inline constexpr const char* kIhPrefix = "ih:";

/// Cohomology tables of the typical fiber Z_i of one hypersurface.
struct FiberTables {
  std::optional<GradedDim> absolute;
  std::optional<GradedDim> compact;
  /// Intersection cohomology of the stratified fiber, keyed by perversity name.
  std::map<std::string, GradedDim> ih;
  /// Injectivity of WH^q(Z) -> H^q(Z), keyed by gate_flag_key or by the bare degree.
  std::map<std::string, Flag> injective;
  /// Dimensions invariant under the deck group when the fiber is a quotient of a cover.
  std::optional<GradedDim> invariant_dims;
  std::string provenance;
};

struct LeafData {
  std::map<std::string, FiberTables> fibers;

  const FiberTables& at(const std::string& id) const {
    auto it = fibers.find(id);
    if (it == fibers.end()) throw Error(ErrorKind::insufficient_data, "no fiber tables for " + id);
    return it->second;
  }
};

inline std::string gate_flag_key(int q, int sign) {
  return std::to_string(q) + (sign > 0 ? "+" : sign < 0 ? "-" : "0");
}

/// Every table of every fiber must fit in degrees 0..dim_fiber.
inline void check_leaf(const FiberedCornersPoset& p, const LeafData& leaf) {
  for (auto& h : p.hypersurfaces) {
    const FiberTables& f = leaf.at(h.id);
    auto fits = [&](const std::optional<GradedDim>& t, const std::string& what) {
      if (t && t->top() > h.dim_fiber)
        throw Error(ErrorKind::invalid_input, what + " table of " + h.id + " exceeds fiber dimension " +
                                                  std::to_string(h.dim_fiber));
    };
    fits(f.absolute, kAbsolute);
    fits(f.compact, kCompact);
    fits(f.invariant_dims, "invariant");
    for (auto& [name, t] : f.ih) fits(t, kIhPrefix + name);
  }
}

/// Global table of the fiber in the named theory, if the leaf carries it.
inline std::optional<GradedDim> theory_table(const FiberTables& f, const std::string& theory) {
  if (theory == kAbsolute) return f.absolute;
  if (theory == kCompact) return f.compact;
  if (theory.rfind(kIhPrefix, 0) == 0) {
    auto it = f.ih.find(theory.substr(3));
    if (it != f.ih.end()) return it->second;
  }
  return std::nullopt;
}

/// Local cohomology near a hypersurface with fiber dimension m in the named theory.
/// A closed fiber without its own intersection cohomology table uses its absolute table.
inline std::optional<GradedDim> reference_local(const FiberTables& f, int m, const std::string& theory,
                                                bool closed = false) {
  if (theory == kAbsolute) return f.absolute;
  if (theory == kCompact) return GradedDim{};
  if (theory.rfind(kIhPrefix, 0) == 0) {
    const std::string name = theory.substr(3);
    auto it = f.ih.find(name);
    std::optional<GradedDim> t;
    if (it != f.ih.end()) t = it->second;
    else if (closed) t = f.absolute;
    if (!t) return std::nullopt;
    return ic_cone_model(*t, m, Perversity::named(name));
  }
  throw Error(ErrorKind::invalid_input, "unknown theory '" + theory + "'");
}

inline std::vector<std::string> fiber_theories(const FiberTables& f) {
  std::vector<std::string> out;
  if (f.absolute) out.push_back(kAbsolute);
  if (f.compact) out.push_back(kCompact);
  for (auto& [name, t] : f.ih) out.push_back(kIhPrefix + name);
  return out;
}

/// One stratum of the local computation.
struct LocalEvaluation {
  std::string id;
  int dim_fiber = 0;
  WeightEntry weight;
  /// "closed" when the fiber has no boundary, else the theory its local models matched.
  std::string fiber_theory;
  GradedDim fiber_wh;
  std::optional<int> gate_degree;
  std::optional<GateResult> gate;
  GradedDim value;
};

struct StratumMatch {
  std::string id;
  GradedDim wh_local;
  std::optional<GradedDim> reference_local;
  bool equal() const { return reference_local && *reference_local == wh_local; }
};

struct TheoryAttempt {
  std::string theory;
  std::vector<StratumMatch> rows;
  bool matched() const {
    return std::all_of(rows.begin(), rows.end(), [](auto& r) { return r.equal(); });
  }
};

/// All strata matched `theory`; rows are the comparison transcript.
struct MatchCertificate {
  std::string theory;
  std::vector<StratumMatch> rows;
};

namespace detail {

inline const WeightEntry& weight_at(const Weight& a, const std::string& id) {
  auto it = a.find(id);
  if (it == a.end()) throw Error(ErrorKind::insufficient_data, "no weight entry for " + id);
  return it->second;
}

inline TheoryAttempt attempt(const FiberedCornersPoset& p, const std::vector<std::string>& ids,
                             const std::map<std::string, LocalEvaluation>& evals, const LeafData& leaf,
                             const std::string& theory) {
  TheoryAttempt t{theory, {}};
  for (auto& j : ids)
    t.rows.push_back({j, evals.at(j).value, reference_local(leaf.at(j), p.at(j).dim_fiber, theory, p.is_maximal(j))});
  return t;
}

inline std::string describe(const TheoryAttempt& t) {
  std::string s = t.theory + ":";
  for (auto& r : t.rows)
    s += " " + r.id + " " + to_string(r.wh_local) + (r.equal() ? "==" : "!=") +
         (r.reference_local ? to_string(*r.reference_local) : std::string("missing"));
  return s;
}

inline const LocalEvaluation& evaluate(const FiberedCornersPoset& p, const std::string& id, const Weight& a,
                                       const LeafData& leaf, std::map<std::string, LocalEvaluation>& memo) {
  if (auto it = memo.find(id); it != memo.end()) return it->second;
  const Hypersurface& h = p.at(id);
  const FiberTables& f = leaf.at(id);
  LocalEvaluation ev;
  ev.id = id;
  ev.dim_fiber = h.dim_fiber;
  ev.weight = weight_at(a, id);
  const auto up = p.above(id);
  if (up.empty()) {
    if (!f.absolute) throw Error(ErrorKind::insufficient_data, "absolute table of closed fiber " + id);
    ev.fiber_theory = "closed";
    ev.fiber_wh = *f.absolute;
  } else {
    for (auto& j : up) evaluate(p, j, a, leaf, memo);
    std::vector<TheoryAttempt> tried;
    for (auto& theory : fiber_theories(f)) {
      tried.push_back(attempt(p, up, memo, leaf, theory));
      if (!tried.back().matched()) continue;
      GradedDim t = *theory_table(f, theory);
      if (ev.fiber_theory.empty()) {
        ev.fiber_theory = theory;
        ev.fiber_wh = t;
      } else if (t != ev.fiber_wh) {
        throw Error(ErrorKind::invalid_input, "fiber of " + id + " matches " + ev.fiber_theory + " and " + theory +
                                                  " with different tables");
      }
    }
    if (ev.fiber_theory.empty()) {
      std::string why;
      for (auto& t : tried) why += "; " + describe(t);
      throw Error(ErrorKind::insufficient_data, "no theory of the fiber of " + id + " matches its local models" + why);
    }
  }
  ev.gate_degree = gate_degree(h.dim_fiber, ev.weight);
  if (ev.gate_degree) {
    const int q = *ev.gate_degree;
    std::optional<Flag> flag;
    if (auto it = f.injective.find(gate_flag_key(q, ev.weight.sign())); it != f.injective.end()) flag = it->second;
    else if (auto jt = f.injective.find(std::to_string(q)); jt != f.injective.end()) flag = jt->second;
    FiberContext ctx;
    ctx.dim = h.dim_fiber;
    ctx.closed = up.empty();
    ctx.matches_absolute = ev.fiber_theory == kAbsolute;
    bool depth_one = !up.empty() && std::all_of(up.begin(), up.end(), [&](auto& j) { return p.is_maximal(j); });
    auto sphere = h.flags.find(kRationalSphereFlag);
    ctx.depth_one_rhs_boundary = depth_one && sphere != h.flags.end() && sphere->second.value;
    std::set<int> signs;
    for (auto& j : up) signs.insert(weight_at(a, j).sign());
    ctx.boundary_sign = signs.size() == 1 ? *signs.begin() : 0;
    ev.gate = injectivity_gate(ev.fiber_wh, f.absolute.value_or(GradedDim{}), flag, q, ctx);
    const std::string where = "stratum " + id + ", degree " + std::to_string(q) + " (" + ev.gate->reason + ")";
    if (ev.gate->verdict == GateVerdict::unknown) throw Error(ErrorKind::injectivity_unknown, where);
    if (ev.gate->verdict == GateVerdict::fail) throw Error(ErrorKind::injectivity_fails, where);
  }
  ev.value = cone_local_model(ev.fiber_wh, h.dim_fiber, ev.weight);
  return memo[id] = ev;
}

}  // namespace detail

/// Local evaluation at every hypersurface, keyed by id.
inline std::map<std::string, LocalEvaluation> evaluate_strata(const FiberedCornersPoset& p, const Weight& a,
                                                              const LeafData& leaf) {
  check_leaf(p, leaf);
  std::map<std::string, LocalEvaluation> memo;
  for (auto& id : p.ids()) detail::evaluate(p, id, a, leaf, memo);
  return memo;
}

inline LocalEvaluation wh_local_detail(const FiberedCornersPoset& p, const std::string& id, const Weight& a,
                                       const LeafData& leaf) {
  check_leaf(p, leaf);
  std::map<std::string, LocalEvaluation> memo;
  return detail::evaluate(p, id, a, leaf, memo);
}

/// Weighted cohomology of a neighbourhood of the stratum: fiber value first, then the cone truncation.
inline GradedDim wh_local(const FiberedCornersPoset& p, const std::string& id, const Weight& a, const LeafData& leaf) {
  return wh_local_detail(p, id, a, leaf).value;
}

/// Compares the local values at every hypersurface with each candidate theory.
inline std::vector<TheoryAttempt> local_match(const FiberedCornersPoset& p, const Weight& a, const LeafData& leaf,
                                              const std::vector<std::string>& theories) {
  auto evals = evaluate_strata(p, a, leaf);
  std::vector<TheoryAttempt> out;
  for (auto& t : theories) out.push_back(detail::attempt(p, p.ids(), evals, leaf, t));
  return out;
}

struct GlobalResult {
  std::optional<GradedDim> value;
  std::optional<MatchCertificate> certificate;
  std::vector<TheoryAttempt> attempts;
  std::map<std::string, LocalEvaluation> local;

  std::string transcript() const {
    std::string s;
    for (auto& t : attempts) s += detail::describe(t) + "\n";
    return s;
  }
};

/// Global weighted cohomology by local-model matching against reference theories with known global tables.
inline GlobalResult wh_global(const FiberedCornersPoset& p, const Weight& a, const LeafData& leaf,
                              const std::map<std::string, GradedDim>& reference) {
  if (reference.empty()) throw Error(ErrorKind::insufficient_data, "no reference tables");
  for (auto& [theory, t] : reference)
    if (t.top() > p.ambient_dim)
      throw Error(ErrorKind::invalid_input, "reference " + theory + " exceeds dimension " + std::to_string(p.ambient_dim));
  GlobalResult r;
  r.local = evaluate_strata(p, a, leaf);
  for (auto& [theory, t] : reference) {
    r.attempts.push_back(detail::attempt(p, p.ids(), r.local, leaf, theory));
    if (!r.certificate && r.attempts.back().matched()) {
      r.certificate = MatchCertificate{theory, r.attempts.back().rows};
      r.value = t;
    }
  }
  if (r.certificate) return r;
  std::set<std::string> others;
  for (auto& [id, f] : leaf.fibers)
    for (auto& t : fiber_theories(f))
      if (!reference.count(t)) others.insert(t);
  if (!reference.count(kCompact)) others.insert(kCompact);
  for (auto& theory : others) {
    auto t = detail::attempt(p, p.ids(), r.local, leaf, theory);
    if (t.matched()) throw Error(ErrorKind::insufficient_data, "local models match " + theory + " but no reference table");
  }
  return r;
}

/// True iff a_q = b_{m-q} for every q.
inline bool duality_audit(const GradedDim& a, const GradedDim& b, int m) {
  if (m < 0 || a.top() > m || b.top() > m) return false;
  for (int q = 0; q <= m; ++q)
    if (a[q] != b[m - q]) return false;
  return true;
}

/// Graded dimension of the image of WH(a) -> WH(-a) given the map ranks, after the rank bound audit.
inline GradedDim reduced_l2_image(const GradedDim& plus, const GradedDim& minus, const std::vector<Rank>& ranks) {
  for (int q = 0; q < static_cast<int>(ranks.size()); ++q) {
    Rank bound = std::min(plus[q], minus[q]);
    if (ranks[q] < 0 || ranks[q] > bound)
      throw Error(ErrorKind::invalid_rank,
                  "degree " + std::to_string(q) + ": rank " + std::to_string(ranks[q]) + " outside [0," + std::to_string(bound) + "]");
  }
  return GradedDim(ranks);
}

inline bool vanishes_above_middle(const GradedDim& t, int m) { return 2 * t.top() <= m; }

// ---------------------------------------------------------------- case studies

struct QaleInputs {
  FiberedCornersPoset poset;
  LeafData leaf;
  /// Complex dimension n; the real dimension is 2n.
  int n = 4;
  GradedDim absolute;
  GradedDim compact;
  Rank middle_image_rank = 0;
  std::map<std::string, std::string> provenance;
};

struct MonopoleInputs {
  FiberedCornersPoset poset;
  KernelData kernels;
  /// Cohomology of the compactified cover whose circle product gives the submaximal fiber.
  GradedDim cover_base;
  /// Part of cover_base invariant under the deck involution.
  GradedDim cover_invariants;
  /// Id of the hypersurface whose fiber is the circle product, and of the one with the closed fiber.
  std::string product_stratum;
  std::string closed_stratum;
  GradedDim closed_fiber;
  /// Universal cover of the lower base and its deck group order.
  GradedDim base_cover;
  int base_deck_order = 2;
  GradedDim ambient_sphere;
  GradedDim singular_component;
  int singular_components = 3;
  /// Values of dim H_c^mid tried when checking the final middle-degree identification.
  std::vector<Rank> middle_dim_trials;
  std::map<std::string, std::string> provenance;
};

struct CaseBundle {
  std::optional<QaleInputs> qale;
  std::optional<MonopoleInputs> monopole;
};

struct CaseReport {
  std::string name;
  std::vector<Table> tables;
  std::vector<std::string> transcript;
  std::vector<std::string> failed_audits;

  bool pass() const { return failed_audits.empty(); }
  void audit(bool ok, const std::string& what) {
    transcript.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
    if (!ok) failed_audits.push_back(what);
  }
  const Table& table(const std::string& n) const {
    for (auto& t : tables)
      if (t.name == n) return t;
    throw Error(ErrorKind::invalid_input, "report has no table " + n);
  }
};

namespace detail {

inline Table certificate_table(const std::string& name, const TheoryAttempt& t) {
  Table out{name, {"stratum", "theory", "wh_local", "reference_local", "equal"}, {}};
  for (auto& r : t.rows)
    out.add({r.id, t.theory, to_string(r.wh_local), r.reference_local ? to_string(*r.reference_local) : "missing",
             bool_cell(r.equal())});
  return out;
}

inline Table local_table(const std::string& name, const std::map<std::string, LocalEvaluation>& evals) {
  Table out{name, {"stratum", "weight", "fiber_theory", "fiber_wh", "gate_degree", "gate", "wh_local"}, {}};
  for (auto& [id, e] : evals)
    out.add({id, to_string(e.weight), e.fiber_theory, to_string(e.fiber_wh),
             e.gate_degree ? std::to_string(*e.gate_degree) : "-",
             e.gate ? std::string(to_string(e.gate->verdict)) + " (" + e.gate->reason + ")" : "-", to_string(e.value)});
  return out;
}

inline std::string interval_cell(const Interval& i) { return to_string(i); }

}  // namespace detail

/// Leaf tables for the Hilbert scheme strata: products of punctual Hilbert schemes.
inline LeafData hilbert_leaf(int n) {
  LeafData leaf;
  for (auto& s : integer_partitions(n)) {
    if (s.size() < 2) continue;
    FiberTables f;
    const int m = stratum_dims(s, n).fiber;
    f.absolute = fiber_cohomology(s);
    f.compact = poincare_dual(*f.absolute, m);
    f.injective[gate_flag_key(m / 2, 1)] = {true, "middle-degree compact-to-absolute map is an isomorphism"};
    f.provenance = "Kunneth product of punctual Hilbert scheme Betti numbers";
    leaf.fibers[shape_id(s)] = f;
  }
  return leaf;
}

inline void hilbert_case_steps(int n, CaseReport& r) {
  auto p = enumerate_strata(n);
  auto leaf = hilbert_leaf(n);
  const int m = p.ambient_dim;

  Table fibers{"fiber_tables", {"stratum", "dim_fiber", "absolute", "compact", "vanishes_above_middle"}, {}};
  bool all_vanish = true;
  for (auto& h : p.hypersurfaces) {
    auto& f = leaf.at(h.id);
    bool v = vanishes_above_middle(*f.absolute, h.dim_fiber);
    all_vanish = all_vanish && v;
    fibers.add({h.id, std::to_string(h.dim_fiber), to_string(*f.absolute), to_string(*f.compact), bool_cell(v)});
  }
  r.tables.push_back(fibers);
  r.audit(all_vanish, "fiber cohomology vanishes above the middle degree");

  const GradedDim h_abs = betti_hilb(n), h_cpt = poincare_dual(h_abs, m);
  std::map<std::string, GradedDim> reference{{kAbsolute, h_abs}, {kCompact, h_cpt}};
  auto minus = wh_global(p, uniform_weight(p.ids(), WeightEntry::eps(-1)), leaf, reference);
  auto plus = wh_global(p, uniform_weight(p.ids(), WeightEntry::eps(1)), leaf, reference);
  r.tables.push_back(detail::local_table("local_minus", minus.local));
  r.tables.push_back(detail::local_table("local_plus", plus.local));
  r.audit(minus.certificate && minus.certificate->theory == kAbsolute, "weight -eps matches absolute cohomology");
  r.audit(plus.certificate && plus.certificate->theory == kCompact, "weight +eps matches compact cohomology");
  if (minus.certificate) r.tables.push_back(detail::certificate_table("match_minus", {minus.certificate->theory, minus.certificate->rows}));
  if (plus.certificate) r.tables.push_back(detail::certificate_table("match_plus", {plus.certificate->theory, plus.certificate->rows}));
  if (!minus.value || !plus.value) {
    r.transcript.push_back(minus.transcript() + plus.transcript());
    return;
  }
  r.audit(duality_audit(*plus.value, *minus.value, m), "duality between weights +eps and -eps");
  r.tables.push_back(graded_table("wh", {"wh_plus", "wh_minus"}, {*plus.value, *minus.value}, m + 1));

  std::vector<Rank> ranks(m + 1, 0);
  ranks[m / 2] = std::min((*plus.value)[m / 2], (*minus.value)[m / 2]);
  auto l2 = reduced_l2_image(*plus.value, *minus.value, ranks);
  r.tables.push_back(graded_table("l2_image", {"wh_plus", "wh_minus", "rank"}, {*plus.value, *minus.value, l2}, m + 1));
  r.audit(l2.top() <= m / 2 && truncate_above(l2, m / 2 - 1).is_zero(), "image concentrated in the middle degree");
}

inline void qale_case_steps(const QaleInputs& in, CaseReport& r) {
  const int n = in.n, m = 2 * n;
  auto sub = check_submaximal_fibers(in.poset);
  r.audit(sub.pass, "submaximal fibers at least 4-dimensional over rational homology spheres");
  std::map<std::string, GradedDim> reference{{kAbsolute, in.absolute}, {kCompact, in.compact}};

  Table t{"weighted_table", {"degree", "weight_plus", "theory_plus", "wh_plus", "weight_minus", "theory_minus", "wh_minus"}, {}};
  std::vector<Rank> wp(m + 1, 0), wm(m + 1, 0), ranks(m + 1, 0);
  bool all_certified = true;
  for (int q = 0; q <= m; ++q) {
    const Rational shift = rat(n - q);
    auto ap = WeightEntry::eps(1) + shift, am = WeightEntry::eps(-1) + shift;
    auto gp = wh_global(in.poset, uniform_weight(in.poset.ids(), ap), in.leaf, reference);
    auto gm = wh_global(in.poset, uniform_weight(in.poset.ids(), am), in.leaf, reference);
    if (!gp.certificate || !gm.certificate) {
      all_certified = false;
      r.transcript.push_back("degree " + std::to_string(q) + "\n" + gp.transcript() + gm.transcript());
      continue;
    }
    wp[q] = (*gp.value)[q];
    wm[q] = (*gm.value)[q];
    t.add({std::to_string(q), to_string(ap), gp.certificate->theory, std::to_string(wp[q]), to_string(am),
           gm.certificate->theory, std::to_string(wm[q])});
    if (q == n) ranks[q] = in.middle_image_rank;
    else if (gp.certificate->theory == gm.certificate->theory) ranks[q] = wp[q];
    else r.audit(false, "degree " + std::to_string(q) + " off the middle changes theory");
  }
  r.tables.push_back(t);
  r.audit(all_certified, "every degree certified by local matching");
  GradedDim plus(wp), minus(wm);
  r.audit(duality_audit(plus, minus, m), "duality between weights +a and -a");
  auto l2 = reduced_l2_image(plus, minus, ranks);
  r.tables.push_back(graded_table("l2", {"compact", "absolute", "l2"}, {in.compact, in.absolute, l2}, m + 1));
  bool three_cases = true;
  for (int q = 0; q <= m; ++q) {
    Rank expect = q < n ? in.compact[q] : q > n ? in.absolute[q] : in.middle_image_rank;
    three_cases = three_cases && l2[q] == expect;
  }
  r.audit(three_cases, "compact below the middle, absolute above, supplied image rank in the middle");
}

/// Weighted cohomology of the circle product, before and after passing to invariants.
struct CircleProductTables {
  GradedDim cover, quotient;
};

inline CircleProductTables circle_product_tables(const GradedDim& cover_base, const GradedDim& invariants,
                                                 const WeightEntry& w) {
  auto base_wh = [&](const GradedDim& t) {
    return [t](const WeightEntry& v) {
      if (v.sign() == 0 || !(v < rat(1)) || !(-v < rat(1)))
        throw Error(ErrorKind::insufficient_data, "base weight " + to_string(v) + " outside (-1,0) and (0,1)");
      return t;
    };
  };
  GradedDim inv = invariants_under_action(cover_base, invariants);
  return {circle_kunneth(base_wh(cover_base), w), circle_kunneth(base_wh(inv), w)};
}

inline void monopole_case_steps(const MonopoleInputs& in, CaseReport& r) {
  const auto& p = in.poset;
  const int m_prod = p.at(in.product_stratum).dim_fiber;

  // Circle-product fiber.
  auto plus = circle_product_tables(in.cover_base, in.cover_invariants, WeightEntry::eps(1));
  auto minus = circle_product_tables(in.cover_base, in.cover_invariants, WeightEntry::eps(-1));
  r.tables.push_back(graded_table("circle_product", {"cover_plus", "cover_minus", "quotient_plus", "quotient_minus"},
                                  {plus.cover, minus.cover, plus.quotient, minus.quotient}, m_prod + 1));
  r.audit(plus.cover == minus.cover && plus.quotient == minus.quotient, "circle product independent of the sign");
  r.audit(duality_audit(plus.quotient, minus.quotient, m_prod), "circle product quotient is self-dual");

  // Cone over the circle product.
  auto cone = cone_local_model(plus.quotient, m_prod, WeightEntry::eps(1));
  r.tables.push_back(graded_table("cone", {"cone"}, {cone}, m_prod + 1));

  // Matching at +eps and -eps against the two middle perversities.
  LeafData leaf;
  FiberTables prod;
  prod.ih["lower_middle"] = plus.quotient;
  prod.ih["upper_middle"] = plus.quotient;
  prod.invariant_dims = in.cover_invariants;
  prod.provenance = "circle product over the compactified cover, deck-invariant part";
  FiberTables closed;
  closed.absolute = in.closed_fiber;
  closed.provenance = "closed fiber";
  leaf.fibers[in.product_stratum] = prod;
  leaf.fibers[in.closed_stratum] = closed;
  const std::vector<std::string> theories{"ih:lower_middle", "ih:upper_middle"};
  for (auto [label, s] : {std::pair<std::string, int>{"plus", 1}, {"minus", -1}}) {
    auto w = uniform_weight(p.ids(), WeightEntry::eps(s));
    r.tables.push_back(detail::local_table("local_" + label, evaluate_strata(p, w, leaf)));
    auto attempts = local_match(p, w, leaf, theories);
    std::string matched;
    for (auto& a : attempts) {
      r.tables.push_back(detail::certificate_table("match_" + label + "_" + a.theory.substr(3), a));
      if (a.matched() && matched.empty()) matched = a.theory;
    }
    const std::string expect = s > 0 ? "ih:upper_middle" : "ih:lower_middle";
    bool exclusive = true;
    for (auto& a : attempts) exclusive = exclusive && (a.matched() == (a.theory == expect));
    r.audit(matched == expect && exclusive, "weight " + label + " eps matches " + expect.substr(3) + " only");
  }
  if (wh_local(p, in.product_stratum, uniform_weight(p.ids(), WeightEntry::eps(1)), leaf) != cone)
    r.audit(false, "cone value agrees with the local evaluation");

  // Leray page of the cone bundle over the universal cover of the base.
  auto page = SpectralPage::product(in.base_cover, cone);
  Table e2{"e2_page", {"p", "q", "value"}, {}};
  for (auto& [pq, v] : page.e2) e2.add({std::to_string(pq.first), std::to_string(pq.second), std::to_string(v)});
  r.tables.push_back(e2);
  auto bounds = total_dim_bounds(page);
  const int top_total = std::max(page.max_total(), 0) + 2;
  Table tot{"total_bounds", {"degree", "bound", "invariant_bound"}, {}};
  bool upper_vanish = true;
  for (int k = 0; k <= top_total; ++k) {
    Interval b = bounds.at(k);
    Interval inv{0, b.hi};
    tot.add({std::to_string(k), detail::interval_cell(b), detail::interval_cell(inv)});
    if (k >= 4) upper_vanish = upper_vanish && b.hi == 0;
  }
  r.tables.push_back(tot);
  r.audit(upper_vanish, "cone bundle cohomology vanishes from degree 4");

  // Pair (ambient sphere, singular set).
  GradedDim sigma;
  for (int c = 0; c < in.singular_components; ++c) sigma = sigma + in.singular_component;
  const int top = std::max(in.ambient_sphere.top(), sigma.top());
  ExactSequenceProblem les;
  les.zero();
  for (int q = 0; q <= top; ++q) {
    les.unknown("H" + std::to_string(q) + "(pair)");
    les.known("H" + std::to_string(q) + "(sphere)", in.ambient_sphere[q]);
    les.known("H" + std::to_string(q) + "(singular)", sigma[q]);
  }
  les.zero();
  auto sol = solve_les(les);
  Table pair{"pair_sequence", {"term", "interval"}, {}};
  for (std::size_t k = 0; k < sol.labels.size(); ++k) pair.add({sol.labels[k], detail::interval_cell(sol.terms[k])});
  r.tables.push_back(pair);
  const Interval h4_pair = sol.at("H4(pair)");
  r.audit(h4_pair == Interval{0, 0}, "degree-4 cohomology of the pair vanishes");

  // Union of the two neighbourhoods.
  ExactSequenceProblem uv;
  uv.known("IH4(UuV,U)", h4_pair.hi).unknown("IH4(UuV)").known("IH4(U)", bounds.at(4).hi);
  auto uv_sol = solve_les(uv);
  const Interval ih4_union = uv_sol.at("IH4(UuV)");
  r.tables.push_back(Table{"union", {"term", "interval"}, {{"IH4(UuV,U)", detail::interval_cell(uv_sol.at("IH4(UuV,U)"))},
                                                          {"IH4(UuV)", detail::interval_cell(ih4_union)},
                                                          {"IH4(U)", detail::interval_cell(uv_sol.at("IH4(U)"))}}});
  r.audit(ih4_union == Interval{0, 0}, "middle intersection cohomology of the union vanishes");

  // Middle-degree identification for each trial value of dim H_c^4.
  Table sen{"middle_identification", {"dim_compact", "ih4", "l2"}, {}};
  bool sen_ok = true;
  for (Rank h : in.middle_dim_trials) {
    ExactSequenceProblem s;
    s.zero("incoming").known("Hc4", h).unknown("IH4").known("IH4(UuV)", ih4_union.hi);
    auto ss = solve_les(s);
    Interval ih4 = ss.at("IH4");
    std::vector<Rank> mid(5, 0), rank(5, 0);
    mid[4] = ih4.hi;
    rank[4] = h;
    auto l2 = ih4.is_point() ? reduced_l2_image(GradedDim(mid), GradedDim(mid), rank) : GradedDim{};
    sen.add({std::to_string(h), detail::interval_cell(ih4), std::to_string(l2[4])});
    sen_ok = sen_ok && ih4 == Interval{h, h} && l2[4] == h;
  }
  r.tables.push_back(sen);
  r.audit(sen_ok, "middle intersection cohomology and image rank equal dim H_c^4");

  // Decay hypotheses on the kernel data.
  auto decay = check_decay_conditions(p, in.kernels, true);
  Table dt{"decay", {"upper", "lower", "condition", "corner_dim", "window", "offending", "pass"}, {}};
  auto list = [](const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s.empty() ? std::string("-") : s;
  };
  for (auto& v : decay.verdicts)
    dt.add({v.upper, v.lower, to_string(v.condition), std::to_string(v.corner_dim), list(v.window), list(v.offending),
            bool_cell(v.pass())});
  r.tables.push_back(dt);
  r.audit(decay.pass(), "decay hypotheses hold with the submaximal relaxation");
}

/// Runs the steps, turning a refusal into a failed audit.
template <class Steps>
CaseReport run_steps(std::string name, Steps steps) {
  CaseReport r;
  r.name = std::move(name);
  try {
    steps(r);
  } catch (const Error& e) {
    r.audit(false, e.what());
  }
  return r;
}

inline CaseReport run_case_study(const std::string& name, const CaseBundle& bundle = {}) {
  static const std::regex hilb(R"(hilbert\((\d+)\))");
  std::smatch mt;
  if (std::regex_match(name, mt, hilb)) {
    int n = std::stoi(mt[1]);
    if (n < 2 || n > 8) throw Error(ErrorKind::invalid_input, "hilbert case needs 2 <= n <= 8");
    return run_steps(name, [&](CaseReport& r) { hilbert_case_steps(n, r); });
  }
  if (name == "qale_sp2") {
    if (!bundle.qale) throw Error(ErrorKind::insufficient_data, "qale_sp2 fixture bundle");
    return run_steps(name, [&](CaseReport& r) { qale_case_steps(*bundle.qale, r); });
  }
  if (name == "monopole_k3") {
    if (!bundle.monopole) throw Error(ErrorKind::insufficient_data, "monopole_k3 fixture bundle");
    return run_steps(name, [&](CaseReport& r) { monopole_case_steps(*bundle.monopole, r); });
  }
  throw Error(ErrorKind::unknown_case_study, name);
}

}  // namespace fibercoh
