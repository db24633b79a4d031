#include <gtest/gtest.h>

#include "fibercoh/assembly.hpp"
#include "fibercoh/simplicial.hpp"

using namespace fibercoh;
namespace cx = fibercoh::complexes;

namespace {

const WeightEntry kPlus = WeightEntry::eps(1), kMinus = WeightEntry::eps(-1);

Hypersurface hyp(std::string id, int fiber, int base) {
  Hypersurface h;
  h.id = std::move(id);
  h.dim_fiber = fiber;
  h.dim_base = base;
  return h;
}

FiberTables closed_fiber(GradedDim t) {
  FiberTables f;
  f.absolute = t;
  f.compact = t;
  return f;
}

// Depth two: "a" has a four-dimensional fiber whose boundary fibers over "b" with a point fiber.
FiberedCornersPoset two_level() {
  FiberedCornersPoset p;
  p.ambient_dim = 8;
  p.hypersurfaces = {hyp("a", 4, 3), hyp("b", 0, 7)};
  p.order = {{"a", "b"}};
  p.chains = {{"a", "b"}};
  return p;
}

LeafData two_level_leaf() {
  LeafData leaf;
  FiberTables a;
  a.absolute = GradedDim{1, 0, 1};
  a.compact = GradedDim{0, 0, 1, 0, 1};
  leaf.fibers["a"] = a;
  leaf.fibers["b"] = closed_fiber({1});
  return leaf;
}

FiberedCornersPoset monopole_poset() {
  FiberedCornersPoset p;
  p.ambient_dim = 8;
  p.hypersurfaces = {hyp("1", 5, 2), hyp("2", 2, 5)};
  p.order = {{"1", "2"}};
  p.chains = {{"1", "2"}};
  return p;
}

MonopoleInputs monopole_inputs() {
  MonopoleInputs in;
  in.poset = monopole_poset();
  in.kernels.kernels = {{"1:1", {}}, {"2:2", {1, 0, 0, 0, 0, 1}}, {"2:1", {1, 0, 0}}};
  in.kernels.degree_sets = {{"1", {}}};
  in.cover_base = {1, 0, 1, 0, 1};
  in.cover_invariants = {1, 0, 0, 0, 1};
  in.product_stratum = "1";
  in.closed_stratum = "2";
  in.closed_fiber = {1, 2, 1};
  in.base_cover = {1, 0, 1};
  in.ambient_sphere = {1, 0, 0, 0, 0, 1};
  in.singular_component = {1, 0, 1};
  in.middle_dim_trials = {0, 1, 2, 3};
  return in;
}

QaleInputs qale_inputs() {
  QaleInputs in;
  FiberedCornersPoset p;
  p.ambient_dim = 8;
  p.hypersurfaces = {hyp("1", 4, 3), hyp("2", 4, 3), hyp("3", 0, 7)};
  for (auto* id : {"1", "2"}) p.hypersurfaces[std::stoi(id) - 1].flags[kRationalSphereFlag] = {true, "test"};
  p.order = {{"1", "3"}, {"2", "3"}};
  p.chains = {{"1", "3"}, {"2", "3"}};
  in.poset = p;
  auto leaf = two_level_leaf();
  in.leaf.fibers = {{"1", leaf.fibers["a"]}, {"2", leaf.fibers["a"]}, {"3", leaf.fibers["b"]}};
  GradedDim z = betti_hilb(2);
  in.absolute = kunneth(z, z);
  in.compact = poincare_dual(in.absolute, 8);
  in.middle_image_rank = 1;
  return in;
}

// Two cone points over a closed link, as a fibered-corners poset with incomparable hypersurfaces.
FiberedCornersPoset suspension_poset(int link_dim) {
  FiberedCornersPoset p;
  p.ambient_dim = link_dim + 1;
  p.hypersurfaces = {hyp("north", link_dim, 0), hyp("south", link_dim, 0)};
  p.chains = {{"north"}, {"south"}};
  return p;
}

}  // namespace

TEST(WhLocal, DepthOneClosedFiberIsTruncation) {
  FiberedCornersPoset p;
  p.ambient_dim = 3;
  p.hypersurfaces = {hyp("t", 2, 0)};
  LeafData leaf;
  leaf.fibers["t"] = closed_fiber({1, 2, 1});
  EXPECT_EQ(wh_local(p, "t", {{"t", kPlus}}, leaf), GradedDim({1}));
  EXPECT_EQ(wh_local(p, "t", {{"t", kMinus}}, leaf), GradedDim({1, 2}));
  EXPECT_EQ(wh_local(p, "t", {{"t", WeightEntry::of(rat(-3, 2))}}, leaf), GradedDim({1, 2, 1}));
  leaf.fibers["t"] = closed_fiber({});
  EXPECT_TRUE(wh_local(p, "t", {{"t", kPlus}}, leaf).is_zero());
}

TEST(WhLocal, MonopoleProductStratum) {
  auto in = monopole_inputs();
  auto t = circle_product_tables(in.cover_base, in.cover_invariants, kPlus);
  LeafData leaf;
  leaf.fibers["1"].ih = {{"lower_middle", t.quotient}, {"upper_middle", t.quotient}};
  leaf.fibers["2"] = closed_fiber(in.closed_fiber);
  auto w = uniform_weight({"1", "2"}, kPlus);
  auto ev = wh_local_detail(in.poset, "1", w, leaf);
  EXPECT_EQ(ev.fiber_theory, "ih:upper_middle");
  EXPECT_EQ(ev.fiber_wh, GradedDim({1, 1, 0, 0, 1, 1}));
  EXPECT_EQ(ev.value, GradedDim({1, 1}));
  EXPECT_EQ(ev.gate_degree, 3);
  EXPECT_EQ(wh_local_detail(in.poset, "1", uniform_weight({"1", "2"}, kMinus), leaf).fiber_theory, "ih:lower_middle");
}

TEST(WhLocal, GateRefusesUnknownAndFailed) {
  auto p = two_level();
  auto leaf = two_level_leaf();
  auto w = uniform_weight({"a", "b"}, kPlus);
  try {
    wh_local(p, "a", w, leaf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::injectivity_unknown);
    EXPECT_NE(std::string(e.what()).find("stratum a, degree 2"), std::string::npos) << e.what();
  }
  p.hypersurfaces[0].flags[kRationalSphereFlag] = {true, "test"};
  auto ev = wh_local_detail(p, "a", w, leaf);
  EXPECT_EQ(ev.gate->verdict, GateVerdict::pass);
  EXPECT_TRUE(ev.value.is_zero());
  leaf.fibers["a"].injective[gate_flag_key(2, 1)] = {false, "test"};
  try {
    wh_local(p, "a", w, leaf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::injectivity_fails);
  }
}

TEST(WhLocal, NonGenericWeightAndMissingData) {
  auto p = two_level();
  auto leaf = two_level_leaf();
  // a = m/2 - q + 1 with m = 4, q = 2.
  Weight w{{"a", WeightEntry::of(rat(1))}, {"b", kMinus}};
  try {
    wh_local(p, "a", w, leaf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_generic_weight);
  }
  try {
    wh_local(p, "a", {{"a", kMinus}}, leaf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
  }
  leaf.fibers["a"].absolute = GradedDim{1, 0, 1, 0, 0, 1};
  EXPECT_THROW(wh_local(p, "a", uniform_weight({"a", "b"}, kMinus), leaf), Error);
}

TEST(WhLocal, MonotoneInOwnEntry) {
  for (int n : {3, 4}) {
    auto p = enumerate_strata(n);
    auto leaf = hilbert_leaf(n);
    for (auto& h : p.hypersurfaces)
      for (const auto& rest : {kPlus, kMinus}) {
        auto w = uniform_weight(p.ids(), rest);
        std::optional<GradedDim> prev;
        int checked = 0;
        for (int k = -12; k <= 12; ++k)
          for (int s : {-1, 1}) {
            w[h.id] = WeightEntry::of(rat(k, 4), s);
            try {
              auto v = wh_local(p, h.id, w, leaf);
              if (prev) {
                EXPECT_TRUE(entrywise_le(v, *prev)) << h.id << " " << to_string(w[h.id]);
              }
              prev = v;
              ++checked;
            } catch (const Error&) {
            }
          }
        EXPECT_GT(checked, 10) << h.id;
      }
  }
}

TEST(WhGlobal, HilbertMatchesAbsoluteAndCompact) {
  for (int n : {2, 3, 4}) {
    auto p = enumerate_strata(n);
    auto leaf = hilbert_leaf(n);
    const GradedDim h = betti_hilb(n), hc = poincare_dual(h, 4 * n - 4);
    std::map<std::string, GradedDim> ref{{kAbsolute, h}, {kCompact, hc}};
    auto minus = wh_global(p, uniform_weight(p.ids(), kMinus), leaf, ref);
    auto plus = wh_global(p, uniform_weight(p.ids(), kPlus), leaf, ref);
    ASSERT_TRUE(minus.certificate && plus.certificate) << n;
    EXPECT_EQ(minus.certificate->theory, kAbsolute);
    EXPECT_EQ(plus.certificate->theory, kCompact);
    EXPECT_EQ(*minus.value, h);
    EXPECT_EQ(*plus.value, hc);
    EXPECT_EQ(minus.certificate->rows.size(), p.hypersurfaces.size());
    EXPECT_TRUE(duality_audit(*plus.value, *minus.value, p.ambient_dim)) << n;
  }
  EXPECT_EQ(betti_hilb(3), GradedDim({1, 0, 1, 0, 1}));
}

TEST(WhGlobal, MismatchIsAResultWithTranscript) {
  FiberedCornersPoset p;
  p.ambient_dim = 3;
  p.hypersurfaces = {hyp("t", 2, 0)};
  LeafData leaf;
  leaf.fibers["t"] = closed_fiber({1, 2, 1});
  auto r = wh_global(p, {{"t", kPlus}}, leaf, {{kAbsolute, {1, 0, 0, 1}}});
  EXPECT_FALSE(r.value);
  EXPECT_FALSE(r.certificate);
  ASSERT_EQ(r.attempts.size(), 1u);
  EXPECT_FALSE(r.attempts[0].matched());
  EXPECT_NE(r.transcript().find("t (1)!=(1,2,1)"), std::string::npos) << r.transcript();
}

TEST(WhGlobal, MissingReferenceIsInsufficientData) {
  auto p = enumerate_strata(3);
  auto leaf = hilbert_leaf(3);
  for (auto ref : {std::map<std::string, GradedDim>{}, std::map<std::string, GradedDim>{{kAbsolute, betti_hilb(3)}}}) {
    try {
      wh_global(p, uniform_weight(p.ids(), kPlus), leaf, ref);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
    }
  }
}

TEST(WhGlobal, LeafTablesMustFitFiberDimension) {
  auto p = two_level();
  auto leaf = two_level_leaf();
  leaf.fibers["b"] = closed_fiber({1, 1});
  EXPECT_THROW(wh_global(p, uniform_weight({"a", "b"}, kMinus), leaf, {{kAbsolute, {1}}}), Error);
}

TEST(WhGlobal, OddFibersAtZeroWeightGiveMiddleIntersectionCohomology) {
  for (auto& link : {cx::sphere(3), cx::sphere(1), cx::circle(5)}) {
    auto x = suspension(link);
    auto p = suspension_poset(link.n);
    LeafData leaf;
    auto betti = intersection_cohomology(link, Perversity::zero());
    leaf.fibers["north"] = closed_fiber(betti);
    leaf.fibers["south"] = closed_fiber(betti);
    auto lo = intersection_cohomology(x, Perversity::lower_middle());
    auto up = intersection_cohomology(x, Perversity::upper_middle());
    Weight zero = uniform_weight(p.ids(), WeightEntry{});
    auto r_lo = wh_global(p, zero, leaf, {{"ih:lower_middle", lo}});
    auto r_up = wh_global(p, zero, leaf, {{"ih:upper_middle", up}});
    ASSERT_TRUE(r_lo.value && r_up.value) << link.n;
    EXPECT_EQ(*r_lo.value, *r_up.value);
    EXPECT_EQ(*r_lo.value, lo);
  }
}

TEST(WhGlobal, EvenFiberAtZeroWeightIsNonGeneric) {
  auto p = suspension_poset(2);
  LeafData leaf;
  leaf.fibers["north"] = closed_fiber({1, 2, 1});
  leaf.fibers["south"] = closed_fiber({1, 2, 1});
  try {
    wh_global(p, uniform_weight(p.ids(), WeightEntry{}), leaf, {{kAbsolute, {1}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_generic_weight);
  }
}

TEST(DualityAudit, GradedExamples) {
  EXPECT_TRUE(duality_audit({1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1}, 5));
  EXPECT_TRUE(duality_audit({1, 1, 0, 0, 1, 1}, {1, 1, 0, 0, 1, 1}, 5));
  EXPECT_FALSE(duality_audit({1, 1}, {1, 1, 1}, 2));
  EXPECT_FALSE(duality_audit({1, 0, 0, 1}, {1, 0, 0, 1}, 2));
  EXPECT_FALSE(duality_audit({1, 2}, {1, 2}, 1));
}

TEST(DualityAudit, DiskCompactAgainstAbsolute) {
  // Compact cohomology of the disk from the pair sequence with its boundary circle.
  ExactSequenceProblem les;
  les.zero();
  GradedDim disk{1}, circle = intersection_cohomology(cx::circle(4), Perversity::zero());
  for (int q = 0; q <= 2; ++q) {
    les.unknown("pair" + std::to_string(q)).known("disk" + std::to_string(q), disk[q]);
    if (q == 0) les.rank_out(1);
    les.known("circle" + std::to_string(q), circle[q]);
  }
  les.zero();
  auto sol = solve_les(les);
  std::vector<Rank> hc;
  for (int q = 0; q <= 2; ++q) {
    auto i = sol.at("pair" + std::to_string(q));
    ASSERT_TRUE(i.is_point());
    hc.push_back(i.lo);
  }
  EXPECT_TRUE(duality_audit(GradedDim(hc), disk, 2));
  EXPECT_TRUE(duality_audit(disk, GradedDim(hc), 2));
}

TEST(ReducedL2Image, BoundsAndExamples) {
  GradedDim plus{0, 0, 0, 0, 1, 0, 2, 0, 1}, minus{1, 0, 2, 0, 1};
  EXPECT_TRUE(reduced_l2_image(plus, minus, std::vector<Rank>(9, 0)).is_zero());
  EXPECT_EQ(reduced_l2_image(plus, minus, {0, 0, 0, 0, 1}), GradedDim({0, 0, 0, 0, 1}));
  try {
    reduced_l2_image(plus, minus, {0, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_rank);
  }
  EXPECT_THROW(reduced_l2_image(plus, minus, {-1}), Error);
}

TEST(CaseStudy, HilbertTwo) {
  auto r = run_case_study("hilbert(2)");
  EXPECT_TRUE(r.pass()) << r.failed_audits.size();
  auto& wh = r.table("wh");
  std::vector<std::string> minus, plus;
  for (std::size_t i = 0; i < wh.rows.size(); ++i) {
    minus.push_back(wh.cell(i, "wh_minus"));
    plus.push_back(wh.cell(i, "wh_plus"));
  }
  EXPECT_EQ(minus, (std::vector<std::string>{"1", "0", "1", "0", "0"}));
  EXPECT_EQ(plus, (std::vector<std::string>{"0", "0", "1", "0", "1"}));
  EXPECT_EQ(r.table("l2_image").cell(2, "rank"), "1");
}

TEST(CaseStudy, HilbertUpToSixPasses) {
  for (int n = 2; n <= 6; ++n) {
    auto r = run_case_study("hilbert(" + std::to_string(n) + ")");
    EXPECT_TRUE(r.pass()) << n;
    auto& l2 = r.table("l2_image");
    for (std::size_t q = 0; q < l2.rows.size(); ++q)
      EXPECT_EQ(l2.cell(q, "rank"), static_cast<int>(q) == 2 * n - 2 ? "1" : "0") << n << " " << q;
  }
}

TEST(CaseStudy, MonopoleChain) {
  auto r = run_case_study("monopole_k3", {std::nullopt, monopole_inputs()});
  for (auto& line : r.transcript) SCOPED_TRACE(line);
  EXPECT_TRUE(r.pass());
  auto& cp = r.table("circle_product");
  for (int q = 0; q <= 5; ++q) {
    EXPECT_EQ(cp.cell(q, "cover_plus"), "1");
    EXPECT_EQ(cp.cell(q, "quotient_minus"), (q == 2 || q == 3) ? "0" : "1");
  }
  auto& cone = r.table("cone");
  for (int q = 0; q <= 5; ++q) EXPECT_EQ(cone.cell(q, "cone"), q <= 1 ? "1" : "0");
  auto& e2 = r.table("e2_page");
  std::set<std::pair<std::string, std::string>> support;
  for (auto& row : e2.rows) support.insert({row[0], row[1]});
  EXPECT_EQ(support, (std::set<std::pair<std::string, std::string>>{{"0", "0"}, {"0", "1"}, {"2", "0"}, {"2", "1"}}));
  EXPECT_EQ(r.table("union").cell(1, "interval"), "[0,0]");
  auto& pair = r.table("pair_sequence");
  for (std::size_t i = 0; i < pair.rows.size(); ++i)
    if (pair.rows[i][0] == "H4(pair)") {
      EXPECT_EQ(pair.rows[i][1], "[0,0]");
    }
  auto& sen = r.table("middle_identification");
  for (std::size_t i = 0; i < sen.rows.size(); ++i) EXPECT_EQ(sen.cell(i, "l2"), sen.cell(i, "dim_compact"));
}

TEST(CaseStudy, MonopoleNegativeControl) {
  auto in = monopole_inputs();
  in.cover_invariants = {1, 0, 1, 0, 1};
  auto r = run_case_study("monopole_k3", {std::nullopt, in});
  EXPECT_FALSE(r.pass());
}

TEST(CaseStudy, QaleTable) {
  auto r = run_case_study("qale_sp2", {qale_inputs(), std::nullopt});
  for (auto& line : r.transcript) SCOPED_TRACE(line);
  EXPECT_TRUE(r.pass());
  auto& l2 = r.table("l2");
  for (int q = 0; q <= 8; ++q) EXPECT_EQ(l2.cell(q, "l2"), q == 4 ? "1" : "0");
  auto& w = r.table("weighted_table");
  EXPECT_EQ(w.cell(4, "theory_plus"), kCompact);
  EXPECT_EQ(w.cell(4, "theory_minus"), kAbsolute);
  EXPECT_EQ(w.cell(2, "theory_minus"), kCompact);
  EXPECT_EQ(w.cell(6, "theory_plus"), kAbsolute);
}

TEST(CaseStudy, QaleZeroData) {
  auto in = qale_inputs();
  for (auto& [id, f] : in.leaf.fibers) f = closed_fiber({});
  in.absolute = {};
  in.compact = {};
  in.middle_image_rank = 0;
  auto r = run_case_study("qale_sp2", {in, std::nullopt});
  EXPECT_TRUE(r.pass());
  for (auto& t : r.tables)
    for (auto& row : t.rows)
      for (std::size_t c = 0; c < row.size(); ++c)
        if (t.header[c] == "l2" || t.header[c] == "wh_plus" || t.header[c] == "wh_minus") {
          EXPECT_EQ(row[c], "0");
        }
}

TEST(CaseStudy, Errors) {
  try {
    run_case_study("unknown");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_case_study);
  }
  EXPECT_THROW(run_case_study("monopole_k3"), Error);
  EXPECT_THROW(run_case_study("hilbert(1)"), Error);
}
