#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "fibercoh/exact_sequence.hpp"
#include "fibercoh/graded.hpp"

namespace fibercoh {

/// First-quadrant E_2 page; d_r maps (p,q) to (p+r, q-r+1).
struct SpectralPage {
  std::map<std::pair<int, int>, Rank> e2;

  static SpectralPage product(const GradedDim& base, const GradedDim& fiber) {
    SpectralPage s;
    for (int p = 0; p <= base.top(); ++p)
      for (int q = 0; q <= fiber.top(); ++q)
        if (base[p] && fiber[q]) s.e2[{p, q}] = base[p] * fiber[q];
    return s;
  }
  Rank at(int p, int q) const {
    auto it = e2.find({p, q});
    return it == e2.end() ? 0 : it->second;
  }
  int max_total() const {
    int m = -1;
    for (auto& [pq, v] : e2)
      if (v) m = std::max(m, pq.first + pq.second);
    return m;
  }
  GradedDim totals() const {
    std::vector<Rank> v(max_total() + 1, 0);
    for (auto& [pq, d] : e2) v[pq.first + pq.second] += d;
    return GradedDim(std::move(v));
  }
};

struct SpectralBounds {
  /// Indexed by total degree; degrees past the end are [0,0].
  std::vector<Interval> total;
  /// First page from which every differential has a zero source or target.
  int degenerates_at = 2;
  /// False when the rank search was cut off and the pairing bound was used instead.
  bool exhaustive = true;

  Interval at(int n) const { return n >= 0 && n < static_cast<int>(total.size()) ? total[n] : Interval{0, 0}; }
};

namespace detail {

struct SpectralSearch {
  std::size_t leaves = 0;
  std::size_t leaf_cap;
  int last_page;
  std::vector<Rank> lo, hi;
  bool aborted = false;

  using Table = std::map<std::pair<int, int>, Rank>;

  void leaf(const Table& t) {
    if (++leaves > leaf_cap) {
      aborted = true;
      return;
    }
    std::vector<Rank> tot(lo.size(), 0);
    for (auto& [pq, v] : t) tot[pq.first + pq.second] += v;
    for (std::size_t n = 0; n < tot.size(); ++n) {
      lo[n] = std::min(lo[n], tot[n]);
      hi[n] = std::max(hi[n], tot[n]);
    }
  }

  void page(const Table& t, int r) {
    if (aborted) return;
    if (r > last_page) {
      leaf(t);
      return;
    }
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> arrows;
    for (auto& [pq, v] : t) {
      std::pair<int, int> tgt{pq.first + r, pq.second - r + 1};
      auto it = t.find(tgt);
      if (v && it != t.end() && it->second) arrows.push_back({pq, tgt});
    }
    Table used;  // rank already consumed at each entry on this page
    choose(t, r, arrows, 0, used);
  }

  void choose(const Table& t, int r,
              const std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>>& arrows,
              std::size_t i, Table& used) {
    if (aborted) return;
    if (i == arrows.size()) {
      Table next;
      for (auto& [pq, v] : t) {
        Rank left = v - (used.count(pq) ? used.at(pq) : 0);
        if (left) next[pq] = left;
      }
      page(next, r + 1);
      return;
    }
    auto [s, g] = arrows[i];
    Rank cap = std::min(t.at(s) - used[s], t.at(g) - used[g]);
    for (Rank k = 0; k <= cap; ++k) {
      used[s] += k;
      used[g] += k;
      choose(t, r, arrows, i + 1, used);
      used[s] -= k;
      used[g] -= k;
    }
  }
};

}  // namespace detail

/// Per total degree: the E_2 total bounds from above; the lower bound is the least total over
/// every admissible choice of differential ranks on every page.
inline SpectralBounds total_dim_bounds(const SpectralPage& page, std::size_t leaf_cap = 2'000'000) {
  SpectralBounds out;
  const GradedDim upper = page.totals();
  const int top = upper.top();
  int maxp = 0, maxq = 0;
  for (auto& [pq, v] : page.e2) {
    if (pq.first < 0 || pq.second < 0 || v < 0)
      throw Error(ErrorKind::invalid_input, "page entries must lie in the first quadrant");
    if (v) maxp = std::max(maxp, pq.first), maxq = std::max(maxq, pq.second);
  }
  const int last_page = std::max(2, std::min(maxp, maxq + 1));

  out.degenerates_at = 2;
  for (int r = last_page; r >= 2; --r) {
    bool any = false;
    for (auto& [pq, v] : page.e2)
      if (v && page.at(pq.first + r, pq.second - r + 1)) any = true;
    if (any) {
      out.degenerates_at = r + 1;
      break;
    }
  }

  detail::SpectralSearch search;
  search.leaf_cap = leaf_cap;
  search.last_page = last_page;
  search.lo.assign(top + 1, kUnbounded);
  search.hi.assign(top + 1, 0);
  detail::SpectralSearch::Table t;
  for (auto& [pq, v] : page.e2)
    if (v) t[pq] = v;
  search.page(t, 2);

  out.total.resize(top + 1);
  if (!search.aborted) {
    for (int n = 0; n <= top; ++n) out.total[n] = {search.lo[n], upper[n]};
  } else {
    out.exhaustive = false;
    for (int n = 0; n <= top; ++n)
      out.total[n] = {std::max<Rank>(0, upper[n] - upper[n - 1] - upper[n + 1]), upper[n]};
  }
  return out;
}

}  // namespace fibercoh
