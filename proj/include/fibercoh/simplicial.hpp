#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fibercoh/error.hpp"
#include "fibercoh/graded.hpp"
#include "fibercoh/sparse_rank.hpp"
#include "fibercoh/weight.hpp"

namespace fibercoh {

/// Sorted vertex list.
using Simplex = std::vector<int>;

/// Closed singular pieces of codimension `codim`: the closure of `simplices` lies in the closed stratum of that codimension.
struct StratumDecl {
  int codim = 0;
  std::vector<Simplex> simplices;
  friend bool operator==(const StratumDecl&, const StratumDecl&) = default;
};

/// Simplicial complex of dimension n generated by `simplices`, with a filtration by closed subcomplexes.
struct StratifiedComplex {
  int n = 0;
  std::vector<Simplex> simplices;
  std::vector<StratumDecl> strata;

  int vertex_count() const {
    int v = 0;
    for (auto& s : simplices)
      for (int x : s) v = std::max(v, x + 1);
    return v;
  }
};

namespace detail {

inline Simplex sorted(Simplex s) {
  std::sort(s.begin(), s.end());
  return s;
}

/// All nonempty faces of s (s sorted).
inline std::vector<Simplex> faces_of(const Simplex& s) {
  std::vector<Simplex> out;
  const int k = static_cast<int>(s.size());
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    Simplex f;
    for (int b = 0; b < k; ++b)
      if (mask >> b & 1) f.push_back(s[b]);
    out.push_back(std::move(f));
  }
  return out;
}

struct FaceTable {
  std::vector<std::vector<Simplex>> by_dim;
  std::vector<std::map<Simplex, int>> index;
  std::map<Simplex, int> codim;  // singular faces only

  int codim_of(const Simplex& s) const {
    auto it = codim.find(s);
    return it == codim.end() ? 0 : it->second;
  }
};

inline FaceTable build_faces(const StratifiedComplex& x) {
  FaceTable t;
  t.by_dim.resize(x.n + 1);
  t.index.resize(x.n + 1);
  for (auto& s0 : x.simplices) {
    for (auto& f : faces_of(sorted(s0))) {
      int d = static_cast<int>(f.size()) - 1;
      if (t.index[d].emplace(f, 0).second) t.by_dim[d].push_back(f);
    }
  }
  for (int d = 0; d <= x.n; ++d) {
    std::sort(t.by_dim[d].begin(), t.by_dim[d].end());
    for (std::size_t i = 0; i < t.by_dim[d].size(); ++i) t.index[d][t.by_dim[d][i]] = static_cast<int>(i);
  }
  for (auto& st : x.strata)
    for (auto& s : st.simplices)
      for (auto& f : faces_of(sorted(s))) {
        int& c = t.codim[f];
        c = std::max(c, st.codim);
      }
  return t;
}

}  // namespace detail

/// Structural checks; throws invalid_input on the first problem.
inline void check_complex(const StratifiedComplex& x) {
  if (x.n < 0) throw Error(ErrorKind::invalid_input, "negative dimension");
  std::set<Simplex> all;
  for (auto& s0 : x.simplices) {
    auto s = detail::sorted(s0);
    if (s.empty() || static_cast<int>(s.size()) > x.n + 1)
      throw Error(ErrorKind::invalid_input, "simplex of wrong size");
    if (std::adjacent_find(s.begin(), s.end()) != s.end() || s.front() < 0)
      throw Error(ErrorKind::invalid_input, "simplex with repeated or negative vertex");
    for (auto& f : detail::faces_of(s)) all.insert(f);
  }
  for (auto& st : x.strata) {
    if (st.codim == 1) throw Error(ErrorKind::invalid_input, "codimension-one stratum");
    if (st.codim < 2 || st.codim > x.n) throw Error(ErrorKind::invalid_input, "stratum codimension out of range");
    for (auto& s : st.simplices) {
      if (!all.count(detail::sorted(s))) throw Error(ErrorKind::invalid_input, "stratum simplex not in complex");
      if (static_cast<int>(s.size()) - 1 > x.n - st.codim)
        throw Error(ErrorKind::invalid_input, "stratum simplex too large for its codimension");
    }
  }
}

/// Intersection cohomology ranks over Q from allowable simplicial chains. Ranks agree with intersection homology
/// in the same degree, so a complex without singular strata returns its ordinary Betti numbers.
inline GradedDim intersection_cohomology(const StratifiedComplex& x, const Perversity& p) {
  check_complex(x);
  auto t = detail::build_faces(x);
  std::set<int> codims;
  for (auto& [f, c] : t.codim) codims.insert(c);
  for (int k : codims)
    if (!p.defined_at(k)) throw Error(ErrorKind::perversity_range, "codimension " + std::to_string(k) + " for " + p.name());

  std::vector<std::vector<char>> allowable(x.n + 1);
  for (int i = 0; i <= x.n; ++i) {
    allowable[i].assign(t.by_dim[i].size(), 1);
    for (std::size_t s = 0; s < t.by_dim[i].size(); ++s) {
      std::map<int, int> worst;  // codim -> largest face dimension meeting that closed stratum
      for (auto& f : detail::faces_of(t.by_dim[i][s])) {
        int c = t.codim_of(f);
        if (c == 0) continue;
        int& w = worst[c];
        w = std::max(w, static_cast<int>(f.size()) - 1);
      }
      for (int k : codims) {
        int d = -1;
        for (auto& [c, w] : worst)
          if (c >= k) d = std::max(d, w);
        if (d >= 0 && d > i - k + p(k)) allowable[i][s] = 0;
      }
    }
  }

  // Rows: allowable i-simplices; `full` keeps the whole boundary, `bad` keeps only non-allowable faces.
  auto boundary_rows = [&](int i, bool bad_only) {
    std::vector<SparseRow> rows;
    for (std::size_t s = 0; s < t.by_dim[i].size(); ++s) {
      if (!allowable[i][s]) continue;
      const Simplex& sig = t.by_dim[i][s];
      SparseRow r;
      for (int j = 0; j <= i; ++j) {
        Simplex f = sig;
        f.erase(f.begin() + j);
        int idx = t.index[i - 1].at(f);
        if (bad_only && allowable[i - 1][idx]) continue;
        r.emplace_back(idx, j % 2 ? -1 : 1);
      }
      std::sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.first < b.first; });
      if (!r.empty()) rows.push_back(std::move(r));
    }
    return rows;
  };

  std::vector<Rank> count(x.n + 2, 0), rank_full(x.n + 2, 0), rank_bad(x.n + 2, 0);
  for (int i = 0; i <= x.n; ++i) {
    count[i] = std::count(allowable[i].begin(), allowable[i].end(), 1);
    if (i > 0) {
      rank_full[i] = exact_rank(boundary_rows(i, false));
      rank_bad[i] = exact_rank(boundary_rows(i, true));
    }
  }
  std::vector<Rank> ih(x.n + 1);
  for (int i = 0; i <= x.n; ++i) ih[i] = count[i] - rank_full[i] - rank_full[i + 1] + rank_bad[i + 1];
  return GradedDim(ih);
}

/// Apex joined to every simplex. The apex is a stratum of codimension n + 1 once that is at least 2.
inline StratifiedComplex cone(const StratifiedComplex& x) {
  const int apex = x.vertex_count();
  StratifiedComplex c;
  c.n = x.n + 1;
  for (auto& s : x.simplices) {
    auto t = detail::sorted(s);
    t.push_back(apex);
    c.simplices.push_back(t);
  }
  for (auto& st : x.strata) {
    StratumDecl d{st.codim, {}};
    for (auto& s : st.simplices) {
      auto t = detail::sorted(s);
      t.push_back(apex);
      d.simplices.push_back(t);
    }
    c.strata.push_back(d);
  }
  if (c.n >= 2) c.strata.push_back({c.n, {{apex}}});
  return c;
}

/// Two apexes, each a stratum of codimension n + 1 once that is at least 2.
inline StratifiedComplex suspension(const StratifiedComplex& x) {
  const int north = x.vertex_count(), south = north + 1;
  StratifiedComplex c;
  c.n = x.n + 1;
  for (int apex : {north, south}) {
    for (auto& s : x.simplices) {
      auto t = detail::sorted(s);
      t.push_back(apex);
      c.simplices.push_back(t);
    }
    for (auto& st : x.strata) {
      StratumDecl d{st.codim, {}};
      for (auto& s : st.simplices) {
        auto t = detail::sorted(s);
        t.push_back(apex);
        d.simplices.push_back(t);
      }
      c.strata.push_back(d);
    }
  }
  if (c.n >= 2) c.strata.push_back({c.n, {{north}, {south}}});
  return c;
}

/// First barycentric subdivision; vertex ids follow the sorted order of the original faces.
inline StratifiedComplex barycentric_subdivision(const StratifiedComplex& x) {
  auto t = detail::build_faces(x);
  std::map<Simplex, int> bary;
  for (int d = 0; d <= x.n; ++d)
    for (auto& f : t.by_dim[d]) bary.emplace(f, static_cast<int>(bary.size()));

  // Maximal flags of faces inside s, as simplices of barycenters.
  auto flags = [&](const Simplex& s) {
    std::vector<Simplex> out;
    Simplex perm = detail::sorted(s);
    do {
      Simplex chain;
      for (std::size_t k = 1; k <= perm.size(); ++k) chain.push_back(bary.at(detail::sorted({perm.begin(), perm.begin() + k})));
      out.push_back(detail::sorted(chain));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  };

  StratifiedComplex b;
  b.n = x.n;
  for (auto& s : x.simplices)
    for (auto& f : flags(s)) b.simplices.push_back(f);
  for (auto& st : x.strata) {
    StratumDecl d{st.codim, {}};
    for (auto& s : st.simplices)
      for (auto& f : flags(s)) d.simplices.push_back(f);
    b.strata.push_back(d);
  }
  return b;
}

/// Stellar subdivision at the face tau: every simplex containing tau is coned from a new vertex over its faces missing a
/// vertex of tau.
inline StratifiedComplex stellar_subdivision(const StratifiedComplex& x, const Simplex& tau0) {
  auto tau = detail::sorted(tau0);
  const int v = x.vertex_count();
  auto split = [&](const std::vector<Simplex>& in) {
    std::vector<Simplex> out;
    for (auto& s0 : in) {
      auto s = detail::sorted(s0);
      if (!std::includes(s.begin(), s.end(), tau.begin(), tau.end())) {
        out.push_back(s);
        continue;
      }
      for (int drop : tau) {
        Simplex r;
        for (int y : s)
          if (y != drop) r.push_back(y);
        r.push_back(v);
        out.push_back(detail::sorted(r));
      }
    }
    return out;
  };
  StratifiedComplex c;
  c.n = x.n;
  c.simplices = split(x.simplices);
  for (auto& st : x.strata) c.strata.push_back({st.codim, split(st.simplices)});
  return c;
}

struct DualityAudit {
  bool dual = false;
  GradedDim ih_p, ih_q;
};

/// Compares IH_p^i with IH_q^{n-i} for complementary perversities.
inline DualityAudit duality_audit(const StratifiedComplex& x, const Perversity& p, const Perversity& q) {
  for (int k = 2; k <= x.n; ++k)
    if (!p.defined_at(k) || !q.defined_at(k) || p(k) + q(k) != k - 2)
      throw Error(ErrorKind::not_complementary, p.name() + " and " + q.name() + " at codimension " + std::to_string(k));
  DualityAudit a;
  a.ih_p = intersection_cohomology(x, p);
  a.ih_q = intersection_cohomology(x, q);
  a.dual = a.ih_q.top() <= x.n && a.ih_p == poincare_dual(a.ih_q, x.n);
  return a;
}

namespace complexes {

/// Boundary of the (d+1)-simplex, a d-sphere.
inline StratifiedComplex sphere(int d) {
  StratifiedComplex x;
  x.n = d;
  for (int drop = 0; drop <= d + 1; ++drop) {
    Simplex s;
    for (int v = 0; v <= d + 1; ++v)
      if (v != drop) s.push_back(v);
    x.simplices.push_back(s);
  }
  return x;
}

inline StratifiedComplex circle(int vertices = 3) {
  StratifiedComplex x;
  x.n = 1;
  for (int v = 0; v < vertices; ++v) x.simplices.push_back(detail::sorted({v, (v + 1) % vertices}));
  return x;
}

/// Seven-vertex torus.
inline StratifiedComplex torus() {
  StratifiedComplex x;
  x.n = 2;
  for (int i = 0; i < 7; ++i) {
    x.simplices.push_back(detail::sorted({i, (i + 1) % 7, (i + 3) % 7}));
    x.simplices.push_back(detail::sorted({i, (i + 2) % 7, (i + 3) % 7}));
  }
  return x;
}

/// Six-vertex real projective plane.
inline StratifiedComplex projective_plane() {
  StratifiedComplex x;
  x.n = 2;
  x.simplices = {{0, 1, 3}, {0, 1, 5}, {0, 2, 4}, {0, 2, 5}, {0, 3, 4},
                 {1, 2, 3}, {1, 2, 4}, {1, 4, 5}, {2, 3, 5}, {3, 4, 5}};
  return x;
}

/// Two 2-spheres glued at one vertex; not a pseudomanifold when declared nonsingular.
inline StratifiedComplex wedge_of_spheres() {
  StratifiedComplex x = sphere(2);
  for (auto s : sphere(2).simplices) {
    for (int& v : s) v = v == 0 ? 0 : v + 3;
    x.simplices.push_back(detail::sorted(s));
  }
  return x;
}

}  // namespace complexes

}  // namespace fibercoh
