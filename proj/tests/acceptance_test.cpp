// Acceptance suite: one test per criterion, each printing a pass/fail line.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <iostream>

#include "support.hpp"
#include "sweep.hpp"
#include "tpref/bench.hpp"
#include "tpref/eval.hpp"
#include "tpref/oracle.hpp"
#include "tpref/rewrite.hpp"

namespace tpref {
namespace {

using test::canonical_reps;
using test::fixture;

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}
  ~Criterion() {
    bool ok = !::testing::Test::HasFailure();
    std::cout << "[ACCEPTANCE] " << name_ << ": " << (ok ? "PASS" : "FAIL")
              << std::endl;
  }

 private:
  std::string name_;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

PairSet formula_relation(const Formula& f, const std::vector<TTuple>& dom) {
  PairSet rel(dom.size());
  for (const auto& s : f.statements) rel |= extension(*f.schema, s, dom);
  return rel;
}

bool has_ext_equal(const Formula& f, const Statement& want,
                   const std::vector<TTuple>& dom) {
  PairSet w = extension(*f.schema, want, dom);
  for (const auto& s : f.statements)
    if (extension(*f.schema, s, dom) == w) return true;
  return false;
}

TEST(Acceptance, C1_RunningExampleReproduction) {
  Criterion c("criterion 1 (wines running example)");
  auto t0 = std::chrono::steady_clock::now();

  auto schema = test::wines_schema();
  Formula f = load_formula_file(fixture("wines.pf"), schema);
  TRelation r = test::wines_data(schema);
  auto dom = enumerate_domain(*schema, kDefaultDomainCap);

  // (a) F^T contains statements extensionally equal to P5 and P6.
  Formula ft = apply_sequence(f, canonicalize("T"));
  Statement p5 =
      parse_formula("Wine<=Amarone > Wine<=red", schema).statements[0];
  Statement p6 =
      parse_formula("Winery<=Siena > Winery<=Langhe & Year<=young", schema)
          .statements[0];
  EXPECT_TRUE(has_ext_equal(ft, p5, dom));
  EXPECT_TRUE(has_ext_equal(ft, p6, dom));

  // (b) Per-statement preference pairs over the six tuples (a..f = 0..5).
  using Pairs = std::vector<std::pair<size_t, size_t>>;
  EXPECT_EQ(extension(*schema, f.statements[0], r.tuples).pairs(),
            (Pairs{{0, 1}, {0, 2}, {0, 4}, {5, 1}, {5, 2}, {5, 4}}));
  EXPECT_EQ(extension(*schema, f.statements[1], r.tuples).pairs(),
            (Pairs{{1, 0}, {1, 5}, {2, 0}, {2, 5}}));
  EXPECT_TRUE(extension(*schema, f.statements[2], r.tuples).empty());
  EXPECT_EQ(extension(*schema, f.statements[3], r.tuples).pairs(),
            (Pairs{{4, 5}}));

  // (c) F^TS replaces P1 by white > red & !Amarone with pairs (a,e), (f,e).
  Formula fts = apply_sequence(f, canonicalize("TS"));
  Statement p7 =
      parse_formula("Wine<=white > Wine<=red & !Wine<=Amarone", schema)
          .statements[0];
  EXPECT_TRUE(has_ext_equal(fts, p7, dom));
  EXPECT_FALSE(has_ext_equal(fts, f.statements[0], dom));
  PairSet p7_pairs = test::restrict_relation(extension(*schema, p7, dom), dom,
                                             TRelation{schema, r.tuples});
  EXPECT_EQ(p7_pairs.pairs(), (Pairs{{0, 4}, {5, 4}}));

  // (d) Best with P1 | P2 over the whole relation, irrelevant tuples kept.
  Formula f12 = parse_formula(
      "Wine<=white > Wine<=red ; Wine<=Amarone > Wine<=white", schema);
  BestOptions full_scan;
  full_scan.keep_irrelevant = true;
  full_scan.naive = true;
  EXPECT_EQ(best(f12, r, full_scan).indices, (std::vector<size_t>{0, 1, 2, 3, 5}));
  Formula f12s = apply_sequence(f12, canonicalize("S"));
  EXPECT_EQ(best(f12s, r, full_scan).indices, (std::vector<size_t>{1, 2, 3}));

  EXPECT_LT(elapsed_s(t0), 1.0);
}

TEST(Acceptance, C2_CycleFixture) {
  Criterion c("criterion 2 (cycle fixture)");
  auto schema = test::wines_schema();
  Formula f = load_formula_file(fixture("wines_cycle.pf"), schema);
  TRelation r4 = load_relation_file(fixture("wines_cycle_data.csv"), schema);

  BestOptions full_scan;
  full_scan.keep_irrelevant = true;
  full_scan.naive = true;
  EXPECT_TRUE(best(f, r4, full_scan).indices.empty());

  TRelation ghl{schema, {r4.tuples[0], r4.tuples[1], r4.tuples[2]}};
  EXPECT_EQ(best(f, ghl, full_scan).indices, (std::vector<size_t>{0}));
  TRelation glm{schema, {r4.tuples[0], r4.tuples[2], r4.tuples[3]}};
  EXPECT_EQ(best(f, glm, full_scan).indices, (std::vector<size_t>{1}));

  // Under T the cycle collapses to indifference; all four survive. The
  // closure is verified against the extension-level oracle.
  EquivalenceReport rep = check_equivalence(f, canonicalize("T"));
  EXPECT_TRUE(rep.all_match()) << to_text(rep);
  Formula ft = apply_sequence(f, canonicalize("T"));
  EXPECT_EQ(best(ft, r4, full_scan).indices, (std::vector<size_t>{0, 1, 2, 3}));

  auto dom = enumerate_domain(*schema, kDefaultDomainCap);
  auto stages = oracle_sequence_stages(
      make_extension_relation(simplify(f), dom), canonicalize("T"));
  PairSet weak = test::restrict_relation(
      stages.back().relation_union(dom.size()), dom, r4);
  EXPECT_EQ(best_from_relation(weak), (std::vector<size_t>{0, 1, 2, 3}));
}

TEST(Acceptance, C3_CalendarFixture) {
  Criterion c("criterion 3 (calendar fixture)");
  // The two halves of this scenario need incompatible taxonomy assumptions
  // about jun versus summer, so the fixture comes in two variants sharing
  // one vocabulary (see the repository notes).
  Formula want_ft;
  for (const char* cfg :
       {"time_disjoint_schema.cfg", "time_overlap_schema.cfg"}) {
    auto schema = Schema::load_file(fixture(cfg));
    Formula f = load_formula_file(fixture("time12.pf"), schema);
    auto dom = enumerate_domain(*schema, kDefaultDomainCap);
    Formula ft = apply_sequence(f, canonicalize("T"));
    Formula want = parse_formula(
        "summer > spring ; may > jul ; summer > jul ; may > spring ; "
        "may > jun ; summer > jun",
        schema);
    // Same statement extensions: the four closure statements added and
    // jul21 > jun dropped.
    ASSERT_EQ(ft.statements.size(), want.statements.size());
    for (const auto& s : want.statements)
      EXPECT_TRUE(has_ext_equal(ft, s, dom)) << cfg;
    Statement p2 = parse_formula("jul21 > jun", schema).statements[0];
    EXPECT_FALSE(has_ext_equal(ft, p2, dom)) << cfg;
  }

  auto tup = [](SchemaPtr schema, const std::string& v) {
    return TTuple{schema->attr(0).taxonomy->value_id(v)};
  };

  {  // TS holds jul21 >= jul10; STS does not (disjoint variant).
    auto schema = Schema::load_file(fixture("time_disjoint_schema.cfg"));
    Formula f = load_formula_file(fixture("time12.pf"), schema);
    Formula ts = apply_sequence(f, canonicalize("TS"));
    Formula sts = apply_sequence(f, canonicalize("STS"));
    EXPECT_TRUE(weak_pref(ts, tup(schema, "jul21"), tup(schema, "jul10")));
    EXPECT_FALSE(weak_pref(sts, tup(schema, "jul21"), tup(schema, "jul10")));
    EXPECT_FALSE(weak_pref(ts, tup(schema, "jul21"), tup(schema, "may")));
  }
  {  // STS holds jul21 >= may via P9 = jul21 > spring; TS does not.
    auto schema = Schema::load_file(fixture("time_overlap_schema.cfg"));
    Formula f = load_formula_file(fixture("time12.pf"), schema);
    auto dom = enumerate_domain(*schema, kDefaultDomainCap);
    Formula st = apply_sequence(f, canonicalize("ST"));
    Statement p9 = parse_formula("jul21 > spring", schema).statements[0];
    EXPECT_TRUE(has_ext_equal(st, p9, dom));
    Formula sts = apply_sequence(f, canonicalize("STS"));
    Formula ts = apply_sequence(f, canonicalize("TS"));
    EXPECT_TRUE(weak_pref(sts, tup(schema, "jul21"), tup(schema, "may")));
    EXPECT_FALSE(weak_pref(ts, tup(schema, "jul21"), tup(schema, "may")));
  }
}

TEST(Acceptance, C4_OracleEquivalenceSweep) {
  Criterion c("criterion 4 (oracle equivalence sweep)");
  auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = test::random_instance(seed * 7919 + 1);
    for (const auto& word : canonical_reps()) {
      EquivalenceReport rep =
          check_equivalence(inst.formula, canonicalize(word));
      if (!rep.all_match()) {
        ++mismatches;
        ADD_FAILURE() << "seed " << seed << " seq " << word << "\n"
                      << to_string(inst.formula) << to_text(rep);
      }
    }
  }
  EXPECT_EQ(mismatches, 0);
  EXPECT_LT(elapsed_s(t0), 300.0);
}

TEST(Acceptance, C5_TheoremPropertySuite) {
  Criterion c("criterion 5 (theorem properties)");
  for (uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = test::random_instance(seed * 7919 + 1);
    test::WordTable tbl = test::build_word_table(inst.formula, 8);
    const size_t D = tbl.domain.size();
    PairSet top = tbl.rel("T");
    for (const auto& [w, st] : tbl.stages) {
      PairSet rw = st.relation_union(D);
      // Eight-representative soundness for every word up to length 8.
      ASSERT_EQ(rw, tbl.rel(canonicalize(w).canonical)) << w << " @" << seed;
      ASSERT_TRUE(rw.subset_of(top)) << "maximality " << w << " @" << seed;
      if (!w.empty()) {
        PairSet parent = tbl.rel(w.substr(0, w.size() - 1));
        if (w.back() == 'T')
          ASSERT_TRUE(parent.subset_of(rw)) << "inflation " << w;
        else
          ASSERT_TRUE(rw.subset_of(parent)) << "deflation " << w;
      }
      if (!w.empty() && w.back() == 'T') {
        ASSERT_TRUE(rw.transitive()) << w << " @" << seed;
        PairSet strict = rw.strict();
        ASSERT_TRUE(strict.irreflexive() && strict.transitive())
            << w << " @" << seed;
      }
    }
    for (const auto& x : canonical_reps()) {
      if (x.size() + 2 <= 8) {
        ASSERT_EQ(tbl.rel(canonicalize(x + "TT").canonical),
                  tbl.rel(canonicalize(x + "T").canonical))
            << "idempotence T after " << x;
        ASSERT_EQ(tbl.rel(canonicalize(x + "SS").canonical),
                  tbl.rel(canonicalize(x + "S").canonical))
            << "idempotence S after " << x;
      }
      PairSet xt = tbl.rel(canonicalize(x + "T").canonical);
      PairSet xtst = tbl.rel(canonicalize(x + "TST").canonical);
      ASSERT_TRUE(xtst.subset_of(xt)) << "XTST <= XT for " << x;
      ASSERT_TRUE(xt.strict().subset_of(xtst.strict()))
          << "strict XT <= strict XTST for " << x;
    }
    ASSERT_TRUE(tbl.rel("TSTST").subset_of(tbl.rel("TST")));
    ASSERT_TRUE(tbl.rel("TST").subset_of(tbl.rel("T")));
    ASSERT_TRUE(
        tbl.rel(canonicalize("STSTST").canonical).subset_of(tbl.rel("STST")));
    ASSERT_TRUE(tbl.rel("STST").subset_of(tbl.rel("ST")));

    // Best_XS is contained in Best_X on a sampled relation.
    TRelation r = test::sample_relation(inst, tbl.domain, 30, seed);
    for (const auto& x : canonical_reps()) {
      PairSet wx = test::restrict_relation(
          tbl.rel(canonicalize(x).canonical), tbl.domain, r);
      PairSet wxs = test::restrict_relation(
          tbl.rel(canonicalize(x + "S").canonical), tbl.domain, r);
      auto bx = best_from_relation(wx);
      auto bxs = best_from_relation(wxs);
      ASSERT_TRUE(std::includes(bx.begin(), bx.end(), bxs.begin(), bxs.end()))
          << "Best_XS not within Best_X for " << x << " @" << seed;
    }
  }
}

TEST(Acceptance, C6_DiffBestWitnesses) {
  Criterion c("criterion 6 (DiffBest witnesses)");
  auto schema = Schema::load_file(fixture("time_disjoint_schema.cfg"));
  const Taxonomy& tax = *schema->attr(0).taxonomy;
  auto one = [&](const std::string& v) { return TTuple{tax.value_id(v)}; };

  for (size_t n : {size_t{10}, size_t{100}}) {
    {
      // Family with Best_TST = r and Best_STST a single tuple.
      Formula f =
          parse_formula("summer > may ; spring > may ; may7 > spring", schema);
      TRelation r{schema, {}};
      r.tuples.push_back(one("may7"));
      for (size_t i = 1; i < n; ++i) r.tuples.push_back(one("apr15"));
      auto [tst_minus, stst_minus] =
          diff_best(f, canonicalize("TST"), canonicalize("STST"), r);
      EXPECT_EQ(tst_minus.size(), n - 1) << "n=" << n;
      EXPECT_TRUE(stst_minus.empty());
    }
    {
      // Family with Best_STST = r and Best_TST a single tuple.
      Formula f = load_formula_file(fixture("time12.pf"), schema);
      TRelation r{schema, {}};
      r.tuples.push_back(one("jul10"));
      for (size_t i = 1; i < n; ++i) r.tuples.push_back(one("jun10"));
      auto [tst_minus, stst_minus] =
          diff_best(f, canonicalize("TST"), canonicalize("STST"), r);
      EXPECT_EQ(stst_minus.size(), n - 1) << "n=" << n;
      EXPECT_TRUE(tst_minus.empty());
    }
  }
}

struct ScalingPoint {
  uint64_t n;
  double median_ms;
};

TEST(Acceptance, C7_DeskScalePerformance) {
  Criterion c("criterion 7 (desk-scale performance)");

  // (a)+(b): defaults f=5, depth 6, N=10K, c=2.
  BenchConfig cfg;
  cfg.sequences = {"TST", "STST"};
  cfg.runs = 30;
  cfg.base_seed = 100;
  BenchResult res = run_benchmark(cfg);
  std::map<std::string, std::vector<double>> ratios;
  size_t good_runs = 0;
  for (const auto& row : res.rows) {
    EXPECT_LT(row.rewrite_ms, 500.0)
        << row.sequence << " seed " << row.seed;  // (a)
    if (!row.good_run || row.relevant == 0) continue;
    ++good_runs;
    ratios[row.sequence].push_back(double(row.best_card) /
                                   double(row.relevant));
    // Criterion 8 on benchmark runs.
    EXPECT_EQ(row.best_indices_heuristic, row.best_indices_plain);
  }
  ASSERT_GT(good_runs, 0u);
  for (const auto& [seq, rs] : ratios)
    EXPECT_LE(median(rs), 0.05) << seq;  // (b)

  // (c): heuristic speedup at c=10 on good runs.
  BenchConfig cfg10 = cfg;
  cfg10.clauses = 10;
  cfg10.base_seed = 300;
  BenchResult res10 = run_benchmark(cfg10);
  std::vector<double> speedups;
  for (const auto& row : res10.rows) {
    if (!row.good_run) continue;
    EXPECT_EQ(row.best_indices_heuristic, row.best_indices_plain);
    if (row.best_ms_heuristic > 0)
      speedups.push_back(row.best_ms_plain / row.best_ms_heuristic);
  }
  ASSERT_GT(speedups.size(), 0u);
  EXPECT_GE(median(speedups), 2.0);

  // (d): near-linear Best scaling in N with the heuristic on good runs.
  std::vector<ScalingPoint> points;
  for (uint64_t n : {uint64_t{10000}, uint64_t{50000}, uint64_t{100000}}) {
    BenchConfig scfg;
    scfg.sequences = {"TST"};
    scfg.dataset_size = n;
    scfg.runs = 10;
    scfg.base_seed = 500;
    BenchResult sres = run_benchmark(scfg);
    std::vector<double> times;
    for (const auto& row : sres.rows)
      if (row.good_run) times.push_back(row.best_ms_heuristic);
    ASSERT_GT(times.size(), 2u) << "n=" << n;
    points.push_back({n, median(times)});
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    double x = std::log(double(p.n));
    double y = std::log(p.median_ms);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  double k = double(points.size());
  double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  std::cout << "[ACCEPTANCE]   scaling medians:";
  for (const auto& p : points) std::cout << " " << p.n << "=" << p.median_ms << "ms";
  std::cout << " slope=" << slope << std::endl;
  EXPECT_GE(slope, 0.8);
  EXPECT_LE(slope, 1.4);
}

TEST(Acceptance, C8_HeuristicCorrectnessOnSweep) {
  Criterion c("criterion 8 (heuristic correctness)");
  std::mt19937_64 rng(2024);
  for (uint64_t seed = 0; seed < 40; ++seed) {
    auto inst = test::random_instance(rng());
    auto dom = enumerate_domain(*inst.schema, 2000);
    TRelation r = test::sample_relation(inst, dom, 60, seed);
    for (const char* word : {"T", "ST", "TST", "STST"}) {
      Formula g = apply_sequence(inst.formula, canonicalize(word));
      BestOptions on, off;
      off.heuristic = false;
      EXPECT_EQ(best(g, r, on).indices, best(g, r, off).indices)
          << word << " seed " << seed;
    }
  }
}

}  // namespace
}  // namespace tpref
