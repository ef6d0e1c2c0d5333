#pragma once

#include <string>
#include <vector>

#include "tpref/formula.hpp"

namespace tpref {

// A word over {T, S} plus its canonical representative. Every word reduces,
// by collapsing repeated letters and rewriting TSTS to TS, to one of the
// eight representatives: the empty word, T, S, TS, ST, TST, STS, STST.
struct OperatorSequence {
  std::string word;
  std::string canonical;

  bool transitive() const {  // strict relation transitive by construction
    return !canonical.empty() && canonical.back() == 'T';
  }
};

OperatorSequence canonicalize(const std::string& word);

// One round of transitive closure rewriting: the fixpoint combining clause
// pairs of (accumulated, original) statements through a shared middle tuple.
// Expects a simplified input.
Formula apply_T(const Formula& f);

// Specificity refinement: repeatedly conjoins each statement with the
// negated reversals of the strictly-more-specific statements, committing a
// whole round at a time. Expects a simplified input.
Formula apply_S(const Formula& f);

// Applies the canonical form of seq left to right; the empty sequence
// returns f unchanged. Non-empty sequences simplify the input first.
Formula apply_sequence(const Formula& f, const OperatorSequence& seq);

// Same, also returning the formula after every operator; stages[0] is the
// (simplified) input.
std::vector<Formula> apply_sequence_stages(const Formula& f,
                                           const OperatorSequence& seq);

}  // namespace tpref
