#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fibercoh/error.hpp"
#include "fibercoh/graded.hpp"
#include "fibercoh/poset.hpp"

namespace fibercoh {

/// Block sizes n_1 >= ... >= n_k >= 1.
using IntPartition = std::vector<int>;

/// Partition of {1..n}; blocks sorted internally and ordered by least element.
struct SetPartition {
  int n = 0;
  std::vector<std::vector<int>> blocks;

  SetPartition() = default;
  SetPartition(int n_, std::vector<std::vector<int>> b) : n(n_), blocks(std::move(b)) {
    std::vector<int> seen(n + 1, 0);
    for (auto& blk : blocks) {
      if (blk.empty()) throw Error(ErrorKind::invalid_input, "empty block");
      std::sort(blk.begin(), blk.end());
      for (int x : blk) {
        if (x < 1 || x > n || seen[x]++) throw Error(ErrorKind::invalid_input, "blocks must partition 1..n");
      }
    }
    if (std::count(seen.begin() + 1, seen.end(), 1) != n)
      throw Error(ErrorKind::invalid_input, "blocks must cover 1..n");
    std::sort(blocks.begin(), blocks.end());
  }

  IntPartition shape() const {
    IntPartition s;
    for (auto& b : blocks) s.push_back(static_cast<int>(b.size()));
    std::sort(s.rbegin(), s.rend());
    return s;
  }
  /// Block label of each element 1..n (index 0 unused).
  std::vector<int> labels() const {
    std::vector<int> l(n + 1, -1);
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (int x : blocks[b]) l[x] = static_cast<int>(b);
    return l;
  }
  friend bool operator==(const SetPartition&, const SetPartition&) = default;
};

inline std::string shape_id(const IntPartition& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

/// Integer partitions of n in reverse-lexicographic order, starting with (n).
inline std::vector<IntPartition> integer_partitions(int n) {
  std::vector<IntPartition> out;
  IntPartition cur;
  std::function<void(int, int)> rec = [&](int left, int maxpart) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int k = std::min(left, maxpart); k >= 1; --k) {
      cur.push_back(k);
      rec(left - k, k);
      cur.pop_back();
    }
  };
  rec(n, n);
  return out;
}

/// All set partitions of {1..n} via restricted growth strings.
inline std::vector<SetPartition> set_partitions(int n) {
  std::vector<SetPartition> out;
  std::vector<int> a(n, 0);
  std::function<void(int, int)> rec = [&](int i, int maxlabel) {
    if (i == n) {
      std::vector<std::vector<int>> b(maxlabel + 1);
      for (int x = 0; x < n; ++x) b[a[x]].push_back(x + 1);
      out.emplace_back(n, std::move(b));
      return;
    }
    for (int l = 0; l <= maxlabel + 1; ++l) {
      a[i] = l;
      rec(i + 1, std::max(maxlabel, l));
    }
  };
  if (n >= 1) {
    a[0] = 0;
    rec(1, 0);
  }
  return out;
}

/// Consecutive blocks of the given sizes.
inline SetPartition representative(const IntPartition& shape) {
  std::vector<std::vector<int>> b;
  int next = 1;
  for (int s : shape) {
    b.emplace_back();
    for (int k = 0; k < s; ++k) b.back().push_back(next++);
  }
  return SetPartition(next - 1, b);
}

/// True iff every block of q lies inside a block of p.
inline bool refines(const SetPartition& p, const SetPartition& q) {
  if (p.n != q.n) throw Error(ErrorKind::invalid_input, "partitions of different sets");
  auto lp = p.labels();
  for (auto& blk : q.blocks)
    for (int x : blk)
      if (lp[x] != lp[blk.front()]) return false;
  return true;
}

struct GroupOrders {
  std::int64_t pointwise;  // elements fixing every point of the stratum's linear span
  std::int64_t setwise;    // elements preserving the span
  std::int64_t quotient;
  friend bool operator==(const GroupOrders&, const GroupOrders&) = default;
};

inline std::int64_t factorial(int k) {
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline GroupOrders group_orders(const SetPartition& p) {
  std::int64_t a = 1, nmult = 1;
  std::map<int, int> mult;
  for (auto& b : p.blocks) {
    a *= factorial(static_cast<int>(b.size()));
    ++mult[static_cast<int>(b.size())];
  }
  for (auto [s, c] : mult) nmult *= factorial(c);
  return {a, a * nmult, nmult};
}

struct StratumDims {
  int complex_span;  // complex dimension of the span V
  int base;          // real dimension of the base sphere quotient
  int fiber;
  friend bool operator==(const StratumDims&, const StratumDims&) = default;
};

inline StratumDims stratum_dims(const IntPartition& shape, int n) {
  int sum = 0;
  for (int s : shape) sum += s;
  if (sum != n) throw Error(ErrorKind::invalid_input, "shape does not partition " + std::to_string(n));
  int k = static_cast<int>(shape.size());
  if (k == 1) throw Error(ErrorKind::not_boundary_stratum, shape_id(shape));
  int v = 2 * (k - 1);
  return {v, 2 * v - 1, 4 * (n - k)};
}

/// [lambda] < [mu] iff some representative of mu refines a fixed representative of lambda.
inline bool shape_less(const IntPartition& lambda, const IntPartition& mu) {
  if (lambda == mu) return false;
  SetPartition p = representative(lambda);
  for (auto& q : set_partitions(p.n))
    if (q.shape() == mu && refines(p, q)) return true;
  return false;
}

/// Betti numbers via the coefficient of u^n in prod_m (1 - t^{2m-2} u^m)^{-1}.
inline GradedDim betti_hilb(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "n must be positive");
  const int tmax = 2 * (n - 1);
  std::vector<std::vector<Rank>> c(n + 1, std::vector<Rank>(tmax + 1, 0));
  c[0][0] = 1;
  for (int m = 1; m <= n; ++m) {
    // Multiply by the geometric series in t^{2m-2} u^m, in place from low to high u.
    for (int u = m; u <= n; ++u)
      for (int t = tmax; t >= 0; --t) {
        int tt = t - (2 * m - 2);
        if (tt >= 0) c[u][t] += c[u - m][tt];
      }
  }
  return GradedDim(c[n]);
}

/// Betti numbers by counting partitions with n - (number of parts) = i in degree 2i.
inline GradedDim betti_hilb_by_partitions(int n) {
  std::vector<Rank> b(2 * (n - 1) + 1, 0);
  for (auto& l : integer_partitions(n)) b[2 * (n - static_cast<int>(l.size()))] += 1;
  return GradedDim(b);
}

/// Absolute cohomology of the product of punctual Hilbert schemes indexed by the blocks.
inline GradedDim fiber_cohomology(const IntPartition& shape) {
  GradedDim out{1};
  for (int s : shape) out = kunneth(out, betti_hilb(s));
  return out;
}

inline FiberedCornersPoset enumerate_strata(int n) {
  if (n < 2) throw Error(ErrorKind::invalid_input, "n must be at least 2");
  FiberedCornersPoset p;
  p.ambient_dim = 4 * n - 4;
  std::vector<IntPartition> shapes;
  for (auto& s : integer_partitions(n))
    if (s.size() > 1) shapes.push_back(s);
  for (auto& s : shapes) {
    auto d = stratum_dims(s, n);
    Hypersurface h;
    h.id = shape_id(s);
    h.dim_fiber = d.fiber;
    h.dim_base = d.base;
    std::map<int, int> mult;
    for (int x : s) ++mult[x];
    bool trivial = true;
    for (auto [size, c] : mult)
      if (size > 1 && c > 1) trivial = false;
    h.flags["orbibundle_holonomy_trivial"] = {trivial, "derived: blocks of equal size > 1 are permuted"};
    std::string fib;
    for (int x : s)
      if (x > 1) fib += (fib.empty() ? "" : "x") + std::string("Hilb") + std::to_string(x);
    h.fiber = fib.empty() ? "point" : fib;
    p.hypersurfaces.push_back(h);
  }
  for (auto& a : shapes)
    for (auto& b : shapes)
      if (shape_less(a, b)) p.order.push_back({shape_id(a), shape_id(b)});
  // Maximal chains of the order.
  std::function<void(std::vector<std::string>&)> extend = [&](std::vector<std::string>& chain) {
    bool grew = false;
    for (auto& s : shapes) {
      auto id = shape_id(s);
      bool cover = p.less(chain.back(), id);
      if (!cover) continue;
      for (auto& t : shapes)
        if (p.less(chain.back(), shape_id(t)) && p.less(shape_id(t), id)) cover = false;
      if (!cover) continue;
      grew = true;
      chain.push_back(id);
      extend(chain);
      chain.pop_back();
    }
    if (!grew) p.chains.push_back(chain);
  };
  for (auto& s : shapes) {
    auto id = shape_id(s);
    if (!p.below(id).empty()) continue;
    std::vector<std::string> chain{id};
    extend(chain);
  }
  return p;
}

struct StratumRecord {
  IntPartition shape;
  StratumDims dims;
};

struct StratumDimensionReport {
  bool pass = true;
  std::vector<std::string> problems;
};

/// Span dimension positive and even, base dimension at least 3, and base gaps of comparable strata at least 3.
inline StratumDimensionReport check_stratum_dimensions(const std::vector<StratumRecord>& strata) {
  StratumDimensionReport r;
  auto flag = [&](std::string s) {
    r.pass = false;
    r.problems.push_back(std::move(s));
  };
  for (auto& s : strata) {
    if (s.dims.complex_span <= 0 || s.dims.complex_span % 2) flag(shape_id(s.shape) + ": span dimension not positive even");
    if (s.dims.base < 3) flag(shape_id(s.shape) + ": base dimension below 3");
  }
  for (auto& lo : strata)
    for (auto& hi : strata)
      if (shape_less(lo.shape, hi.shape) && hi.dims.base - lo.dims.base - 1 < 3)
        flag(shape_id(lo.shape) + " < " + shape_id(hi.shape) + ": corner fiber dimension below 3");
  return r;
}

inline std::vector<StratumRecord> hilbert_strata(int n) {
  std::vector<StratumRecord> out;
  for (auto& s : integer_partitions(n))
    if (s.size() > 1) out.push_back({s, stratum_dims(s, n)});
  return out;
}

inline StratumDimensionReport check_stratum_dimensions(int n) { return check_stratum_dimensions(hilbert_strata(n)); }

}  // namespace fibercoh
