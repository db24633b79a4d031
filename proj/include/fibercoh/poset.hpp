#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fibercoh/error.hpp"
#include "fibercoh/graded.hpp"
#include "fibercoh/local_models.hpp"

namespace fibercoh {

inline constexpr const char* kRationalSphereFlag = "boundary_universal_cover_rational_homology_sphere";

struct Hypersurface {
  std::string id;
  int dim_fiber = 0;
  int dim_base = 0;
  std::optional<GradedDim> link_ih;
  std::map<std::string, Flag> flags;
  /// Free-form description of the typical fiber.
  std::string fiber;
};

/// Boundary hypersurfaces of a manifold with fibered corners. `order` holds pairs (a, b) with H_a < H_b.
struct FiberedCornersPoset {
  int ambient_dim = 0;
  std::vector<Hypersurface> hypersurfaces;
  std::vector<std::pair<std::string, std::string>> order;
  std::vector<std::vector<std::string>> chains;

  const Hypersurface* find(const std::string& id) const {
    for (auto& h : hypersurfaces)
      if (h.id == id) return &h;
    return nullptr;
  }
  const Hypersurface& at(const std::string& id) const {
    if (auto* h = find(id)) return *h;
    throw Error(ErrorKind::invalid_input, "unknown hypersurface " + id);
  }
  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (auto& h : hypersurfaces) out.push_back(h.id);
    return out;
  }

  /// Strict order from the transitive closure of the declared pairs.
  bool less(const std::string& a, const std::string& b) const {
    std::set<std::string> seen;
    std::vector<std::string> stack{a};
    while (!stack.empty()) {
      std::string x = stack.back();
      stack.pop_back();
      for (auto& [lo, hi] : order)
        if (lo == x && seen.insert(hi).second) {
          if (hi == b) return true;
          stack.push_back(hi);
        }
    }
    return false;
  }
  std::vector<std::string> above(const std::string& id) const {
    std::vector<std::string> out;
    for (auto& h : hypersurfaces)
      if (h.id != id && less(id, h.id)) out.push_back(h.id);
    return out;
  }
  std::vector<std::string> below(const std::string& id) const {
    std::vector<std::string> out;
    for (auto& h : hypersurfaces)
      if (h.id != id && less(h.id, id)) out.push_back(h.id);
    return out;
  }
  bool is_maximal(const std::string& id) const { return above(id).empty(); }
  bool is_submaximal(const std::string& id) const {
    auto up = above(id);
    return !up.empty() && std::all_of(up.begin(), up.end(), [&](auto& j) { return is_maximal(j); });
  }
  /// dim Z_ij = dim S_i - dim S_j - 1 for H_j < H_i, and dim S_i for i == j.
  int corner_fiber_dim(const std::string& i, const std::string& j) const {
    if (i == j) return at(i).dim_base;
    return at(i).dim_base - at(j).dim_base - 1;
  }
  /// Ids listed so that every hypersurface comes after all hypersurfaces below it.
  std::vector<std::string> compatible_labelling() const {
    std::vector<std::string> ids_ = ids();
    std::map<std::string, int> height;
    std::function<int(const std::string&)> h = [&](const std::string& id) {
      if (auto it = height.find(id); it != height.end()) return it->second;
      int best = 0;
      for (auto& j : below(id)) best = std::max(best, h(j) + 1);
      return height[id] = best;
    };
    std::stable_sort(ids_.begin(), ids_.end(), [&](auto& a, auto& b) { return h(a) < h(b) || (h(a) == h(b) && a < b); });
    return ids_;
  }
};

struct Violation {
  std::string kind;
  std::vector<std::string> ids;
  std::string detail;
  friend bool operator<(const Violation& a, const Violation& b) {
    return std::tie(a.kind, a.ids, a.detail) < std::tie(b.kind, b.ids, b.detail);
  }
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate(const FiberedCornersPoset& p) {
  std::set<Violation> out;
  std::map<std::string, int> seen;
  for (auto& h : p.hypersurfaces) {
    if (++seen[h.id] == 2) out.insert({"duplicate id", {h.id}, ""});
    if (h.dim_fiber < 0 || h.dim_base < 0) out.insert({"negative dimension", {h.id}, ""});
    if (h.dim_fiber + h.dim_base + 1 != p.ambient_dim)
      out.insert({"dimension sum", {h.id},
                  std::to_string(h.dim_fiber) + " + " + std::to_string(h.dim_base) + " + 1 != " +
                      std::to_string(p.ambient_dim)});
    if (h.link_ih && h.link_ih->top() > h.dim_fiber)
      out.insert({"link table exceeds fiber dimension", {h.id}, to_string(*h.link_ih)});
  }
  std::set<std::pair<std::string, std::string>> rel;
  for (auto& [a, b] : p.order) {
    bool known = true;
    for (auto* id : {&a, &b})
      if (!p.find(*id)) out.insert({"unknown id", {*id}, "order"}), known = false;
    if (!known) continue;
    if (a == b) out.insert({"reflexive pair", {a}, ""});
    rel.insert({a, b});
  }
  for (auto& [a, b] : rel) {
    if (a != b && rel.count({b, a})) out.insert({"antisymmetry", {std::min(a, b), std::max(a, b)}, ""});
    for (auto& [c, d] : rel)
      if (c == b && a != d && !rel.count({a, d})) out.insert({"transitivity", {a, b, d}, "missing " + a + " < " + d});
    if (a != b) {
      int dz = p.at(b).dim_base - p.at(a).dim_base - 1;
      if (dz < 0) out.insert({"negative corner fiber dimension", {a, b}, std::to_string(dz)});
    }
  }
  for (auto& chain : p.chains) {
    for (auto& id : chain)
      if (!p.find(id)) out.insert({"unknown id", {id}, "chain"});
    for (std::size_t x = 0; x < chain.size(); ++x)
      for (std::size_t y = x + 1; y < chain.size(); ++y) {
        auto& a = chain[x];
        auto& b = chain[y];
        if (a == b || !(rel.count({a, b}) || rel.count({b, a})))
          out.insert({"chain not totally ordered", {std::min(a, b), std::max(a, b)}, ""});
      }
  }
  return {std::vector<Violation>(out.begin(), out.end())};
}

/// Number of hypersurfaces in the longest chain of the order.
inline int depth(const FiberedCornersPoset& p) {
  std::map<std::string, int> memo;
  std::function<int(const std::string&, int)> up = [&](const std::string& id, int guard) -> int {
    if (guard > static_cast<int>(p.hypersurfaces.size())) throw Error(ErrorKind::invalid_input, "order has a cycle");
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    int best = 1;
    for (auto& [a, b] : p.order)
      if (a == id) best = std::max(best, 1 + up(b, guard + 1));
    return memo[id] = best;
  };
  int d = 0;
  for (auto& h : p.hypersurfaces) d = std::max(d, up(h.id, 0));
  return d;
}

/// The sub-poset on the given ids, with induced order and chains.
inline FiberedCornersPoset restrict_to(const FiberedCornersPoset& p, const std::set<std::string>& keep) {
  FiberedCornersPoset out;
  out.ambient_dim = p.ambient_dim;
  for (auto& h : p.hypersurfaces)
    if (keep.count(h.id)) out.hypersurfaces.push_back(h);
  for (auto& pr : p.order)
    if (keep.count(pr.first) && keep.count(pr.second)) out.order.push_back(pr);
  for (auto& c : p.chains) {
    std::vector<std::string> cc;
    for (auto& id : c)
      if (keep.count(id)) cc.push_back(id);
    if (!cc.empty()) out.chains.push_back(cc);
  }
  return out;
}

struct WittReport {
  bool witt = true;
  std::vector<std::string> offending;
};

/// Every even-dimensional link must have vanishing lower-middle intersection cohomology in its middle degree.
inline WittReport witt_check(const FiberedCornersPoset& p) {
  WittReport r;
  for (auto& h : p.hypersurfaces) {
    if (h.dim_fiber % 2) continue;
    if (!h.link_ih) throw Error(ErrorKind::insufficient_data, "link_ih missing for " + h.id);
    if ((*h.link_ih)[h.dim_fiber / 2] != 0) {
      r.witt = false;
      r.offending.push_back(h.id);
    }
  }
  return r;
}

/// Kernel dimensions keyed "i:j" for H_j <= H_i; degree sets keyed by j.
struct KernelData {
  std::map<std::string, GradedDim> kernels;
  std::map<std::string, GradedDim> projected;
  std::map<std::string, std::set<int>> degree_sets;
  std::map<std::string, std::string> provenance;
};

inline std::string pair_key(const std::string& i, const std::string& j) { return i + ":" + j; }

enum class DecayCondition { closed_window, open_window, projected_kernel };

inline const char* to_string(DecayCondition c) {
  switch (c) {
    case DecayCondition::closed_window: return "kernel_closed_window";
    case DecayCondition::open_window: return "kernel_open_window";
    case DecayCondition::projected_kernel: return "projected_kernel";
  }
  return "";
}

struct DecayVerdict {
  std::string upper, lower;  // pair (i, j) with H_j <= H_i
  DecayCondition condition;
  int corner_dim;
  std::vector<int> window;
  std::vector<int> offending;
  bool pass() const { return offending.empty(); }
};

struct DecayReport {
  std::vector<DecayVerdict> verdicts;
  bool pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](auto& v) { return v.pass(); });
  }
  const DecayVerdict* find(const std::string& i, const std::string& j, DecayCondition c) const {
    for (auto& v : verdicts)
      if (v.upper == i && v.lower == j && v.condition == c) return &v;
    return nullptr;
  }
};

namespace detail {
/// Degrees q in [0, d] with |2q - d| compared against `twice_radius`.
inline std::vector<int> window(int d, int twice_radius, bool closed) {
  std::vector<int> w;
  for (int q = 0; q <= d; ++q) {
    int dist = std::abs(2 * q - d);
    if (closed ? dist <= twice_radius : dist < twice_radius) w.push_back(q);
  }
  return w;
}
}  // namespace detail

/// Mechanical check of the kernel-vanishing hypotheses that give decay of harmonic forms.
inline DecayReport check_decay_conditions(const FiberedCornersPoset& p, const KernelData& k,
                                          bool submaximal_relaxation) {
  DecayReport r;
  auto lookup = [&](const std::map<std::string, GradedDim>& m, const std::string& key, int d) -> const GradedDim& {
    auto it = m.find(key);
    if (it == m.end()) throw Error(ErrorKind::insufficient_data, "kernel for pair " + key);
    if (it->second.top() > d)
      throw Error(ErrorKind::invalid_input, "kernel for pair " + key + " exceeds dimension " + std::to_string(d));
    return it->second;
  };
  for (auto& hi : p.hypersurfaces) {
    std::vector<std::string> lower{hi.id};
    for (auto& j : p.below(hi.id)) lower.push_back(j);
    for (auto& j : lower) {
      int d = p.corner_fiber_dim(hi.id, j);
      const GradedDim& ker = lookup(k.kernels, pair_key(hi.id, j), d);
      bool relaxed = submaximal_relaxation && j != hi.id && p.is_maximal(hi.id) && p.is_submaximal(j);
      DecayVerdict v{hi.id, j, relaxed ? DecayCondition::open_window : DecayCondition::closed_window, d,
                     detail::window(d, 2, !relaxed), {}};
      for (int q : v.window)
        if (ker[q]) v.offending.push_back(q);
      r.verdicts.push_back(v);

      if (j == hi.id) continue;
      DecayVerdict pv{hi.id, j, DecayCondition::projected_kernel, d, detail::window(d, 3, true), {}};
      GradedDim proj;
      auto key = pair_key(hi.id, j);
      if (k.projected.count(key)) proj = lookup(k.projected, key, d);
      else if (auto ds = k.degree_sets.find(j); ds != k.degree_sets.end() && ds->second.empty()) proj = {};
      else throw Error(ErrorKind::insufficient_data, "projected kernel for pair " + key);
      for (int q : pv.window)
        if (proj[q]) pv.offending.push_back(q);
      r.verdicts.push_back(pv);
    }
  }
  return r;
}

struct SubmaximalFiberReport {
  bool pass = true;
  std::vector<std::string> too_small;
  std::vector<std::string> flag_false;
};

/// Depth-two posets whose submaximal fibers are at least 4-dimensional with rational-homology-sphere boundary.
inline SubmaximalFiberReport check_submaximal_fibers(const FiberedCornersPoset& p) {
  if (int d = depth(p); d != 2) throw Error(ErrorKind::wrong_depth, "depth " + std::to_string(d));
  SubmaximalFiberReport r;
  for (auto& h : p.hypersurfaces) {
    if (!p.is_submaximal(h.id)) continue;
    auto it = h.flags.find(kRationalSphereFlag);
    if (it == h.flags.end()) throw Error(ErrorKind::insufficient_data, std::string(kRationalSphereFlag) + " on " + h.id);
    if (h.dim_fiber < 4) r.too_small.push_back(h.id);
    if (!it->second.value) r.flag_false.push_back(h.id);
  }
  r.pass = r.too_small.empty() && r.flag_false.empty();
  return r;
}

}  // namespace fibercoh
