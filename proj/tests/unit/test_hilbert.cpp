#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fibercoh/hilbert.hpp"

using namespace fibercoh;

namespace {

// Rank of a small integer matrix by Bareiss elimination.
int small_rank(std::vector<std::vector<std::int64_t>> m) {
  int rows = static_cast<int>(m.size()), cols = rows ? static_cast<int>(m[0].size()) : 0, r = 0;
  std::int64_t prev = 1;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    for (int i = r + 1; i < rows; ++i) {
      for (int j = c + 1; j < cols; ++j) m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
      m[i][c] = 0;
    }
    prev = m[r][c];
    ++r;
  }
  return r;
}

// Spanning vectors of the coincidence subspace: n * indicator(block) - |block| * (1,...,1).
std::vector<std::vector<std::int64_t>> span_vectors(const SetPartition& p) {
  std::vector<std::vector<std::int64_t>> out;
  for (auto& b : p.blocks) {
    std::vector<std::int64_t> v(p.n, -static_cast<std::int64_t>(b.size()));
    for (int x : b) v[x - 1] += p.n;
    out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> act(const std::vector<int>& perm, const std::vector<std::int64_t>& v) {
  std::vector<std::int64_t> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[perm[i]] = v[i];
  return w;
}

GroupOrders brute_force_orders(const SetPartition& p) {
  auto span = span_vectors(p);
  int dim = small_rank(span);
  std::vector<int> perm(p.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t fix = 0, stab = 0;
  do {
    bool fixes = true;
    auto both = span;
    for (auto& v : span) {
      auto w = act(perm, v);
      fixes &= w == v;
      both.push_back(w);
    }
    fix += fixes;
    stab += small_rank(both) == dim;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {fix, stab, stab / fix};
}

}  // namespace

TEST(Partitions, CountsAndOrder) {
  EXPECT_EQ(integer_partitions(4), (std::vector<IntPartition>{{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}}));
  const std::vector<std::size_t> p{1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42};
  const std::vector<std::size_t> bell{1, 1, 2, 5, 15, 52, 203, 877};
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(integer_partitions(n).size(), p[n]);
  for (int n = 1; n <= 7; ++n) EXPECT_EQ(set_partitions(n).size(), bell[n]);
}

TEST(Refines, Examples) {
  for (int n = 2; n <= 5; ++n) {
    SetPartition coarsest(n, {[&] {
                            std::vector<int> v(n);
                            std::iota(v.begin(), v.end(), 1);
                            return v;
                          }()});
    std::vector<std::vector<int>> singles;
    for (int x = 1; x <= n; ++x) singles.push_back({x});
    SetPartition finest(n, singles);
    for (auto& q : set_partitions(n)) {
      EXPECT_TRUE(refines(coarsest, q));
      EXPECT_TRUE(refines(q, finest));
    }
  }
  SetPartition a(4, {{1, 2}, {3, 4}}), b(4, {{1, 3}, {2, 4}});
  EXPECT_FALSE(refines(a, b));
  EXPECT_FALSE(refines(b, a));
}

TEST(Refines, IsPartialOrder) {
  auto all = set_partitions(5);
  for (auto& p : all) {
    EXPECT_TRUE(refines(p, p));
    for (auto& q : all) {
      if (refines(p, q) && refines(q, p)) {
        EXPECT_EQ(p, q);
      }
      if (!refines(p, q)) continue;
      for (auto& r : all) {
        if (refines(q, r)) {
          EXPECT_TRUE(refines(p, r));
        }
      }
    }
  }
}

TEST(GroupOrders, Examples) {
  for (int n = 3; n <= 7; ++n) {
    std::vector<std::vector<int>> b{{1, 2}};
    for (int x = 3; x <= n; ++x) b.push_back({x});
    EXPECT_EQ(group_orders(SetPartition(n, b)), (GroupOrders{2, 2 * factorial(n - 2), factorial(n - 2)}));
  }
  EXPECT_EQ(group_orders(SetPartition(4, {{1, 2}, {3, 4}})), (GroupOrders{4, 8, 2}));
  EXPECT_EQ(group_orders(SetPartition(5, {{1}, {2}, {3}, {4}, {5}})), (GroupOrders{1, 120, 120}));
}

TEST(GroupOrders, MatchesStabilizerEnumeration) {
  for (int n = 1; n <= 6; ++n)
    for (auto& p : set_partitions(n)) EXPECT_EQ(group_orders(p), brute_force_orders(p)) << n;
}

TEST(StratumDims, Examples) {
  EXPECT_EQ(stratum_dims({2, 1}, 3), (StratumDims{2, 3, 4}));
  EXPECT_EQ(stratum_dims({1, 1, 1}, 3), (StratumDims{4, 7, 0}));
  EXPECT_EQ(stratum_dims({1, 1}, 2), (StratumDims{2, 3, 0}));
  try {
    stratum_dims({3}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_boundary_stratum);
  }
}

TEST(StratumDims, DimensionIdentity) {
  for (int n = 2; n <= 8; ++n)
    for (auto& s : hilbert_strata(n)) EXPECT_EQ(1 + s.dims.base + s.dims.fiber, 4 * n - 4);
}

TEST(EnumerateStrata, SmallCases) {
  auto p2 = enumerate_strata(2);
  ASSERT_EQ(p2.hypersurfaces.size(), 1u);
  EXPECT_EQ(p2.hypersurfaces[0].id, "(1,1)");
  auto p3 = enumerate_strata(3);
  ASSERT_EQ(p3.ids(), (std::vector<std::string>{"(2,1)", "(1,1,1)"}));
  EXPECT_TRUE(p3.less("(2,1)", "(1,1,1)"));
  EXPECT_EQ(depth(p3), 2);
  EXPECT_TRUE(validate(p3).ok());
  auto p4 = enumerate_strata(4);
  EXPECT_EQ(p4.ids(), (std::vector<std::string>{"(3,1)", "(2,2)", "(2,1,1)", "(1,1,1,1)"}));
  EXPECT_TRUE(p4.less("(2,2)", "(1,1,1,1)"));
  EXPECT_TRUE(p4.less("(2,1,1)", "(1,1,1,1)"));
  EXPECT_TRUE(p4.less("(3,1)", "(2,1,1)"));
  EXPECT_TRUE(p4.less("(2,2)", "(2,1,1)"));
  EXPECT_FALSE(p4.less("(3,1)", "(2,2)"));
  EXPECT_FALSE(p4.less("(2,2)", "(3,1)"));
  EXPECT_EQ(depth(p4), 3);
}

TEST(EnumerateStrata, ValidAndCounted) {
  for (int n = 2; n <= 7; ++n) {
    auto p = enumerate_strata(n);
    EXPECT_TRUE(validate(p).ok()) << n;
    EXPECT_EQ(p.hypersurfaces.size(), integer_partitions(n).size() - 1);
    EXPECT_EQ(depth(p), n - 1);
    EXPECT_TRUE(p.is_maximal(shape_id(IntPartition(n, 1))));
  }
}

TEST(EnumerateStrata, HolonomyFlags) {
  auto p = enumerate_strata(4);
  EXPECT_FALSE(p.at("(2,2)").flags.at("orbibundle_holonomy_trivial").value);
  EXPECT_TRUE(p.at("(2,1,1)").flags.at("orbibundle_holonomy_trivial").value);
}

TEST(BettiHilb, Examples) {
  EXPECT_EQ(betti_hilb(1), GradedDim({1}));
  EXPECT_EQ(betti_hilb(2), GradedDim({1, 0, 1}));
  EXPECT_EQ(betti_hilb(3), GradedDim({1, 0, 1, 0, 1}));
  EXPECT_EQ(betti_hilb(4), GradedDim({1, 0, 1, 0, 2, 0, 1}));
}

TEST(BettiHilb, TwoMethodsAgreeAndVanishAboveMiddle) {
  for (int n = 1; n <= 10; ++n) {
    auto b = betti_hilb(n);
    EXPECT_EQ(b, betti_hilb_by_partitions(n));
    EXPECT_LE(b.top(), 2 * (n - 1));
    EXPECT_EQ(b.total(), static_cast<Rank>(integer_partitions(n).size()));
    for (int q = 1; q <= b.top(); q += 2) EXPECT_EQ(b[q], 0);
    if (n >= 2) {
      EXPECT_NE(b, poincare_dual(b, 4 * n - 4));
    }
  }
}

TEST(StratumDimensions, HoldForSmallN) {
  for (int n = 2; n <= 8; ++n) EXPECT_TRUE(check_stratum_dimensions(n).pass) << n;
}

TEST(StratumDimensions, InjectedOddSpanFlagged) {
  auto strata = hilbert_strata(3);
  strata[0].dims.complex_span = 3;
  auto r = check_stratum_dimensions(strata);
  EXPECT_FALSE(r.pass);
  ASSERT_EQ(r.problems.size(), 1u);
}

TEST(FiberCohomology, Products) {
  EXPECT_EQ(fiber_cohomology({1, 1, 1}), GradedDim({1}));
  EXPECT_EQ(fiber_cohomology({2, 1}), GradedDim({1, 0, 1}));
  EXPECT_EQ(fiber_cohomology({2, 2}), GradedDim({1, 0, 2, 0, 1}));
}
