#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace fibercoh {

/// Sparse integer row: (column, value) pairs, columns strictly increasing, no zero values.
using SparseRow = std::vector<std::pair<int, mpz_class>>;

namespace detail {

inline void make_primitive(SparseRow& r) {
  mpz_class g = 0;
  for (auto& [c, v] : r) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g == 1) return;
  }
  if (g > 1)
    for (auto& [c, v] : r) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

/// a * row - b * piv, computed by merging.
inline SparseRow combine(const mpz_class& a, const SparseRow& row, const mpz_class& b, const SparseRow& piv) {
  SparseRow out;
  out.reserve(row.size() + piv.size());
  std::size_t i = 0, j = 0;
  while (i < row.size() || j < piv.size()) {
    if (j == piv.size() || (i < row.size() && row[i].first < piv[j].first)) {
      out.emplace_back(row[i].first, a * row[i].second);
      ++i;
    } else if (i == row.size() || piv[j].first < row[i].first) {
      out.emplace_back(piv[j].first, -b * piv[j].second);
      ++j;
    } else {
      mpz_class v = a * row[i].second - b * piv[j].second;
      if (v != 0) out.emplace_back(row[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace detail

/// Exact rank over Q of a sparse integer matrix given by rows, using fraction-free row reduction.
inline std::int64_t exact_rank(std::vector<SparseRow> rows) {
  std::map<int, SparseRow> pivots;  // leading column -> reduced row
  for (auto& row : rows) {
    while (!row.empty()) {
      auto it = pivots.find(row.front().first);
      if (it == pivots.end()) {
        detail::make_primitive(row);
        int lead = row.front().first;
        pivots.emplace(lead, std::move(row));
        break;
      }
      const SparseRow& piv = it->second;
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), piv.front().second.get_mpz_t(), row.front().second.get_mpz_t());
      mpz_class a = piv.front().second / g, b = row.front().second / g;
      row = detail::combine(a, row, b, piv);
      detail::make_primitive(row);
    }
  }
  return static_cast<std::int64_t>(pivots.size());
}

}  // namespace fibercoh
