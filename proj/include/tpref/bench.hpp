#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tpref/eval.hpp"
#include "tpref/formula.hpp"

namespace tpref {

enum class TaxonomyKind { kRegular, kRandom, kScaleFree };
enum class PreferenceKind { kConflicting, kContextual };

TaxonomyKind taxonomy_kind_from_string(const std::string& s);
PreferenceKind preference_kind_from_string(const std::string& s);
std::string to_string(TaxonomyKind k);
std::string to_string(PreferenceKind k);

// Defaults follow the bold column of the operating-parameters table:
// regular taxonomy, f=5, depth 6, one attribute, two input clauses,
// 10K tuples, conflicting preferences.
struct BenchConfig {
  TaxonomyKind taxonomy_kind = TaxonomyKind::kRegular;
  uint32_t fanout = 5;
  uint32_t depth = 6;
  double exponent = 2.7;
  uint64_t target_nodes = 15000;  // scale-free only
  uint32_t attrs = 1;
  uint64_t dataset_size = 10000;
  uint32_t clauses = 2;  // input clause count; conflicting pairs = clauses/2
  PreferenceKind pref_kind = PreferenceKind::kConflicting;
  std::vector<std::string> sequences{"", "T", "TST", "STST"};
  uint32_t runs = 100;  // independent seeded runs
  uint64_t base_seed = 1;
  double good_threshold = 0.02;

  static BenchConfig load_file(const std::string& path);
  void apply_key(const std::string& key, const std::string& value);
};

// n tuples with every attribute drawn uniformly from its full value set.
TRelation gen_dataset(SchemaPtr schema, uint64_t n, uint64_t seed);

// `pairs` conflicting statement pairs on the first attribute's taxonomy:
// v1 > v2 between distinct maximal values, then v2' > v1 with v2' strictly
// below v2, which makes the second statement more specific by construction.
Formula gen_conflicting(SchemaPtr schema, uint32_t pairs, uint64_t seed);

// One conflicting pair on attribute 1 with identical context values drawn
// from the remaining d-1 attributes on both sides of every clause.
Formula gen_contextual(SchemaPtr schema, uint32_t d, uint64_t seed);

struct BenchRow {
  uint64_t seed = 0;
  std::string sequence;
  double rewrite_ms = 0;
  double best_ms_plain = 0;
  double best_ms_heuristic = 0;
  uint64_t best_card = 0;
  uint64_t relevant = 0;
  bool good_run = false;
  std::vector<size_t> best_indices_heuristic;  // for cross-checks
  std::vector<size_t> best_indices_plain;
};

struct BenchResult {
  BenchConfig config;
  std::vector<BenchRow> rows;
};

BenchResult run_benchmark(const BenchConfig& cfg);

void write_csv(std::ostream& out, const BenchResult& result);
// Mean/median per (sequence, column) cell as comment lines.
void write_summary(std::ostream& out, const BenchResult& result);

double median(std::vector<double> xs);

}  // namespace tpref
