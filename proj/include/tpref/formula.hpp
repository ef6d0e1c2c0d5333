#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpref/taxonomy.hpp"

namespace tpref {

// Attribute -> taxonomy bindings, in declaration order.
class Schema {
 public:
  struct Attribute {
    std::string name;
    std::shared_ptr<const Taxonomy> taxonomy;
  };

  explicit Schema(std::vector<Attribute> attrs);

  // Config format: one `attribute = taxonomy-file` line per attribute,
  // paths resolved relative to the config file.
  static std::shared_ptr<const Schema> load_file(const std::string& path);

  size_t size() const { return attrs_.size(); }
  const Attribute& attr(size_t i) const { return attrs_[i]; }
  const std::vector<Attribute>& attrs() const { return attrs_; }
  std::optional<size_t> attr_index(const std::string& name) const;

  // Product of the taxonomy sizes, saturating at uint64 max.
  uint64_t domain_size() const;

 private:
  std::vector<Attribute> attrs_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

// Positional by schema attribute.
using TTuple = std::vector<ValueId>;

struct TRelation {
  SchemaPtr schema;
  std::vector<TTuple> tuples;
};

// Header row of attribute names, one tuple per row.
TRelation load_relation(std::istream& in, SchemaPtr schema,
                        const std::string& where);
TRelation load_relation_file(const std::string& path, SchemaPtr schema);
void save_relation(std::ostream& out, const TRelation& rel);

enum class Polarity : uint8_t { kLeq, kNotLeq };

struct Predicate {
  uint32_t attr = 0;
  Polarity polarity = Polarity::kLeq;
  ValueId value = 0;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

// C(x,y) = C_b(x) and C_w(y); an empty side is the vacuous conjunction.
struct Clause {
  std::vector<Predicate> better;
  std::vector<Predicate> worse;

  friend bool operator==(const Clause&, const Clause&) = default;
};

enum class Side : uint8_t { kBetter, kWorse };

// DNF of clauses.
struct Statement {
  std::string id;
  std::vector<Clause> clauses;
};

struct Formula {
  SchemaPtr schema;
  std::vector<Statement> statements;
};

// --- Parsing and printing -------------------------------------------------

// DSL: formula := statement (";" statement)*, statement := clause ("|" clause)*,
// clause := conj ">" conj, conj := pred ("&" pred)*, pred := ["!"] term,
// term := IDENT "<=" IDENT | IDENT. Lines starting with '#' are comments.
Formula parse_formula(const std::string& text, SchemaPtr schema);
Formula load_formula_file(const std::string& path, SchemaPtr schema);

std::string to_string(const Predicate& p, const Schema& schema);
std::string to_string(const Clause& c, const Schema& schema);
std::string to_string(const Statement& s, const Schema& schema);
// Canonical DSL, re-parseable; one statement per line.
std::string to_string(const Formula& f);

// --- Semantics ------------------------------------------------------------

bool matches(const Schema& schema, const TTuple& t,
             const std::vector<Predicate>& conj);
bool matches_side(const Schema& schema, const TTuple& t, const Clause& c,
                  Side side);

// Exact satisfiability of a one-variable conjunction, by per-attribute
// down-set arithmetic; the pairwise contradiction tests run first as a
// pre-filter.
bool conjunction_satisfiable(const Schema& schema,
                             const std::vector<Predicate>& conj);
bool clause_satisfiable(const Schema& schema, const Clause& c);

// extension(c1) subset-of extension(c2), via unsatisfiability of c1 and
// the negation of c2.
bool clause_implies(const Schema& schema, const Clause& c1, const Clause& c2);

// extension(p) subset-of extension(q) over the full domain.
bool statement_implies(const Schema& schema, const Statement& p,
                       const Statement& q);

// p(x,y) implies q(y,x) (Impl-set test of the S operator).
bool statement_implies_reversed(const Schema& schema, const Statement& p,
                                const Statement& q);

// Same statement with the two tuple variables swapped.
Statement reverse_statement(const Statement& s);

// DNF of p(x,y) and not q(y,x); contradictory clauses dropped, sibling-
// subsumed clauses removed. May return a statement with no clauses.
Statement conjoin_negation(const Schema& schema, const Statement& p,
                           const Statement& q);

// Normalizes a clause in place: sorts and dedupes predicates, drops
// predicates entailed by the rest of their side.
void normalize_clause(const Schema& schema, Clause& c);

// Normalizes the statement's clauses, drops contradictory ones and clauses
// subsumed by a sibling. Extension-preserving.
Statement simplify_statement(const Schema& schema, Statement s);

// Drops contradictory clauses, sibling-subsumed clauses, and statements
// whose extension is contained in a retained statement's. Deterministic:
// statements are scanned in position order and the earlier one survives a
// mutual subsumption.
Formula simplify(const Formula& f);

// Post-simplification cap on the DNF size of a single statement.
inline constexpr size_t kMaxClausesPerStatement = 4096;

}  // namespace tpref
