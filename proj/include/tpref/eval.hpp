#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "tpref/formula.hpp"
#include "tpref/rewrite.hpp"

namespace tpref {

// t1 weakly preferred to t2: some clause of some statement matches both sides.
bool weak_pref(const Formula& f, const TTuple& t1, const TTuple& t2);

// weak_pref(t1,t2) and not weak_pref(t2,t1).
bool strict_pref(const Formula& f, const TTuple& t1, const TTuple& t2);

// t matches the better or the worse side of at least one clause.
bool relevant(const Formula& f, const TTuple& t);

inline constexpr uint64_t kInfiniteHeight = UINT64_MAX;

// Minimum taxonomy height of the LEQ values over the better sides t matches;
// kInfiniteHeight when no better side matches.
uint64_t height_index(const Formula& f, const TTuple& t);

struct BestOptions {
  bool heuristic = true;        // presort by ascending height index
  bool keep_irrelevant = false; // rank tuples the formula never mentions too
  bool naive = false;           // quadratic reference scan instead of BNL
};

struct BestResult {
  std::vector<size_t> indices;  // into the input relation, ascending
  std::vector<TTuple> tuples;
  size_t relevant_count = 0;
  uint64_t comparisons = 0;  // strict dominance tests performed
  std::chrono::nanoseconds elapsed{0};
};

// Tuples of r not strictly dominated by any other, restricted to relevant
// tuples unless keep_irrelevant. The BNL window path assumes a transitive
// strict relation; the naive path is the plain definition scan.
BestResult best(const Formula& f, const TRelation& r, const BestOptions& opts);

// Best under seqA minus Best under seqB and vice versa, both rewritten
// independently from f. Differences are index-based, so duplicate tuples
// count separately.
std::pair<std::vector<size_t>, std::vector<size_t>> diff_best(
    const Formula& f, const OperatorSequence& seqA, const OperatorSequence& seqB,
    const TRelation& r);

}  // namespace tpref
