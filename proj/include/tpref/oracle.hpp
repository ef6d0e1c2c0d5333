#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpref/formula.hpp"
#include "tpref/rewrite.hpp"

namespace tpref {

// Dense set of ordered pairs over an enumerated finite domain.
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(size_t n);

  size_t domain() const { return n_; }
  void set(size_t a, size_t b);
  bool test(size_t a, size_t b) const;

  bool empty() const;
  uint64_t count() const;

  PairSet& operator|=(const PairSet& o);
  PairSet& operator&=(const PairSet& o);
  PairSet& subtract(const PairSet& o);

  bool subset_of(const PairSet& o) const;
  friend bool operator==(const PairSet& a, const PairSet& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }

  // {(a,c) | exists b: (a,b) in this and (b,c) in o}.
  PairSet compose(const PairSet& o) const;
  PairSet reversed() const;
  PairSet transitive_closure() const;

  // Strict part: (a,b) present and (b,a) absent.
  PairSet strict() const;

  bool irreflexive() const;
  bool transitive() const;

  std::vector<std::pair<size_t, size_t>> pairs(size_t limit = SIZE_MAX) const;

 private:
  size_t n_ = 0, words_per_row_ = 0;
  std::vector<uint64_t> bits_;
};

// All t-tuples over the schema in lexicographic order (first attribute
// slowest); every taxonomy value participates. Throws DomainTooLarge past
// the cap.
inline constexpr uint64_t kDefaultDomainCap = 250000;
std::vector<TTuple> enumerate_domain(const Schema& schema, uint64_t cap);

// All (i, j) with s(domain[i], domain[j]); `domain` may also be the tuple
// list of a t-relation (restricted-domain mode).
PairSet extension(const Schema& schema, const Statement& s,
                  const std::vector<TTuple>& domain);

// Per-statement extensions of a formula over an enumerated domain. The
// oracle keeps the statement decomposition because the S operator depends
// on it, not only on the union.
struct ExtensionRelation {
  std::vector<std::string> ids;
  std::vector<PairSet> extensions;

  PairSet relation_union(size_t n) const;
};

ExtensionRelation make_extension_relation(const Formula& f,
                                          const std::vector<TTuple>& domain);

// Extension-level T: least fixpoint of composing accumulated extensions
// with the original ones; the union equals the transitive closure of the
// input union.
ExtensionRelation oracle_T(const ExtensionRelation& ext);

// Extension-level S: per round, each extension strictly containing the
// reversal of another loses those reversed pairs; empty extensions drop.
ExtensionRelation oracle_S(const ExtensionRelation& ext);

// ext after each operator of seq.canonical; stages[0] is the input.
std::vector<ExtensionRelation> oracle_sequence_stages(
    const ExtensionRelation& ext, const OperatorSequence& seq);

// Best tuples straight from a materialized weak relation.
std::vector<size_t> best_from_relation(const PairSet& weak);

struct StageReport {
  std::string stage;  // "input", then growing prefixes of the sequence
  bool match = false;
  uint64_t formula_pairs = 0;
  uint64_t oracle_pairs = 0;
  // First few mismatches, rendered as (tuple, tuple, where) rows.
  std::vector<std::string> mismatches;
};

struct EquivalenceReport {
  OperatorSequence seq;
  std::vector<StageReport> stages;
  bool all_match() const;
};

// Runs the formula pipeline and the extension pipeline independently from
// the same (simplified) input and compares the weak-relation unions per
// stage over the full domain.
EquivalenceReport check_equivalence(const Formula& f,
                                    const OperatorSequence& seq,
                                    uint64_t domain_cap = kDefaultDomainCap);

std::string to_text(const EquivalenceReport& report);
std::string to_json_lines(const EquivalenceReport& report);

}  // namespace tpref
