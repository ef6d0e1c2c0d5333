#include "tpref/formula.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tpref/errors.hpp"

namespace tpref {

Schema::Schema(std::vector<Attribute> attrs) : attrs_(std::move(attrs)) {
  std::set<std::string> seen;
  for (const auto& a : attrs_) {
    if (!a.taxonomy)
      fail(ErrorKind::kInvalidArgument, "attribute without taxonomy: " + a.name);
    if (!seen.insert(a.name).second)
      fail(ErrorKind::kInvalidArgument, "duplicate attribute name: " + a.name);
  }
}

std::optional<size_t> Schema::attr_index(const std::string& name) const {
  for (size_t i = 0; i < attrs_.size(); ++i)
    if (attrs_[i].name == name) return i;
  return std::nullopt;
}

uint64_t Schema::domain_size() const {
  uint64_t n = 1;
  for (const auto& a : attrs_) {
    uint64_t s = a.taxonomy->size();
    if (s != 0 && n > UINT64_MAX / s) return UINT64_MAX;
    n *= s;
  }
  return n;
}

bool matches(const Schema& schema, const TTuple& t,
             const std::vector<Predicate>& conj) {
  for (const auto& p : conj) {
    bool le = schema.attr(p.attr).taxonomy->leq(t[p.attr], p.value);
    if (le != (p.polarity == Polarity::kLeq)) return false;
  }
  return true;
}

bool matches_side(const Schema& schema, const TTuple& t, const Clause& c,
                  Side side) {
  return matches(schema, t, side == Side::kBetter ? c.better : c.worse);
}

namespace {

struct Group {
  std::vector<ValueId> leqs;
  std::vector<ValueId> notleqs;
};

std::map<uint32_t, Group> group_by_attr(const std::vector<Predicate>& conj) {
  std::map<uint32_t, Group> groups;
  for (const auto& p : conj) {
    auto& g = groups[p.attr];
    (p.polarity == Polarity::kLeq ? g.leqs : g.notleqs).push_back(p.value);
  }
  return groups;
}

bool group_satisfiable(const Taxonomy& tax, const Group& g) {
  // Pairwise pre-filter (also exact for the common cases below).
  for (ValueId v : g.leqs)
    for (ValueId w : g.notleqs)
      if (tax.leq(v, w)) return false;
  for (size_t i = 0; i < g.leqs.size(); ++i)
    for (size_t j = i + 1; j < g.leqs.size(); ++j) {
      ValueId a = g.leqs[i], b = g.leqs[j];
      if (!tax.leq(a, b) && !tax.leq(b, a) && !tax.common_descendant(a, b))
        return false;
    }

  if (g.leqs.empty()) {
    // A witness exists iff some root is not itself excluded.
    for (ValueId r : tax.roots()) {
      bool excluded = false;
      for (ValueId w : g.notleqs)
        if (r == w) { excluded = true; break; }
      if (!excluded) return true;
    }
    return false;
  }

  // If one LEQ value sits below all others it is its own witness (the
  // pre-filter already cleared it against every NOT_LEQ value).
  for (ValueId v : g.leqs) {
    bool minimal = true;
    for (ValueId u : g.leqs)
      if (!tax.leq(v, u)) { minimal = false; break; }
    if (minimal) return true;
  }

  // Incomparable LEQ values in a forest have disjoint down-sets.
  if (tax.functional()) return false;

  // Exact fallback: enumerate one down-set.
  for (ValueId cand : tax.down_set(g.leqs[0])) {
    bool ok = true;
    for (ValueId v : g.leqs)
      if (!tax.leq(cand, v)) { ok = false; break; }
    if (!ok) continue;
    for (ValueId w : g.notleqs)
      if (tax.leq(cand, w)) { ok = false; break; }
    if (ok) return true;
  }
  return false;
}

Predicate flipped(const Predicate& p) {
  Predicate q = p;
  q.polarity = p.polarity == Polarity::kLeq ? Polarity::kNotLeq : Polarity::kLeq;
  return q;
}

bool pred_less(const Predicate& a, const Predicate& b) {
  if (a.attr != b.attr) return a.attr < b.attr;
  if (a.polarity != b.polarity) return a.polarity < b.polarity;
  return a.value < b.value;
}

void normalize_conj(const Schema& schema, std::vector<Predicate>& conj) {
  std::sort(conj.begin(), conj.end(), pred_less);
  conj.erase(std::unique(conj.begin(), conj.end()), conj.end());

  auto groups = group_by_attr(conj);
  std::vector<Predicate> out;
  for (auto& [attr, g] : groups) {
    const Taxonomy& tax = *schema.attr(attr).taxonomy;
    std::vector<ValueId> leqs;
    for (ValueId v : g.leqs) {
      bool redundant = false;
      for (ValueId u : g.leqs)
        if (u != v && tax.leq(u, v)) { redundant = true; break; }
      if (!redundant) leqs.push_back(v);
    }
    for (ValueId v : leqs)
      out.push_back({attr, Polarity::kLeq, v});
    for (ValueId w : g.notleqs) {
      bool redundant = false;
      for (ValueId u : g.notleqs)
        if (u != w && tax.leq(w, u)) { redundant = true; break; }
      // t below v already rules out w when v and w share no descendant.
      for (ValueId v : leqs) {
        if (redundant) break;
        if (!tax.leq(v, w) && !tax.common_descendant(v, w)) redundant = true;
      }
      if (!redundant) out.push_back({attr, Polarity::kNotLeq, w});
    }
  }
  std::sort(out.begin(), out.end(), pred_less);
  conj = std::move(out);
}

}  // namespace

void normalize_clause(const Schema& schema, Clause& c) {
  normalize_conj(schema, c.better);
  normalize_conj(schema, c.worse);
}

bool conjunction_satisfiable(const Schema& schema,
                             const std::vector<Predicate>& conj) {
  for (const auto& [attr, g] : group_by_attr(conj))
    if (!group_satisfiable(*schema.attr(attr).taxonomy, g)) return false;
  return true;
}

bool clause_satisfiable(const Schema& schema, const Clause& c) {
  return conjunction_satisfiable(schema, c.better) &&
         conjunction_satisfiable(schema, c.worse);
}

bool clause_implies(const Schema& schema, const Clause& c1, const Clause& c2) {
  if (!clause_satisfiable(schema, c1)) return true;
  // c1 and not-c2 distributes into one contradiction check per predicate,
  // each confined to a single tuple variable.
  for (const auto& p : c2.better) {
    auto conj = c1.better;
    conj.push_back(flipped(p));
    if (conjunction_satisfiable(schema, conj)) return false;
  }
  for (const auto& p : c2.worse) {
    auto conj = c1.worse;
    conj.push_back(flipped(p));
    if (conjunction_satisfiable(schema, conj)) return false;
  }
  return true;
}

namespace {

constexpr size_t kMaxImplicationNodes = 1 << 20;

// Whether c and the negation of every clause in `dnf` is unsatisfiable,
// i.e. ext(c) is contained in ext(dnf).
bool clause_implies_dnf(const Schema& schema, const Clause& c,
                        const std::vector<Clause>& dnf) {
  if (!clause_satisfiable(schema, c)) return true;
  for (const auto& d : dnf)
    if (clause_implies(schema, c, d)) return true;

  size_t nodes = 0;
  // Branch over one flipped predicate per clause of `dnf`; an implication
  // failure is a satisfiable full branch.
  auto rec = [&](auto&& self, const Clause& cur, size_t j) -> bool {
    if (++nodes > kMaxImplicationNodes)
      fail(ErrorKind::kCapacityExceeded, "implication expansion too large");
    if (!clause_satisfiable(schema, cur)) return true;
    if (j == dnf.size()) return false;
    for (const auto& p : dnf[j].better) {
      Clause next = cur;
      next.better.push_back(flipped(p));
      if (!self(self, next, j + 1)) return false;
    }
    for (const auto& p : dnf[j].worse) {
      Clause next = cur;
      next.worse.push_back(flipped(p));
      if (!self(self, next, j + 1)) return false;
    }
    // A clause with no predicates cannot be negated satisfiably.
    if (dnf[j].better.empty() && dnf[j].worse.empty()) return true;
    return true;
  };
  return rec(rec, c, 0);
}

}  // namespace

bool statement_implies(const Schema& schema, const Statement& p,
                       const Statement& q) {
  for (const auto& c : p.clauses)
    if (!clause_implies_dnf(schema, c, q.clauses)) return false;
  return true;
}

Statement reverse_statement(const Statement& s) {
  Statement r;
  r.id = s.id;
  r.clauses.reserve(s.clauses.size());
  for (const auto& c : s.clauses) r.clauses.push_back({c.worse, c.better});
  return r;
}

bool statement_implies_reversed(const Schema& schema, const Statement& p,
                                const Statement& q) {
  return statement_implies(schema, p, reverse_statement(q));
}

namespace {

// Sibling subsumption inside one statement; the earlier clause survives a
// mutual containment.
void drop_subsumed_clauses(const Schema& schema, std::vector<Clause>& clauses) {
  std::vector<bool> dropped(clauses.size(), false);
  for (size_t i = 0; i < clauses.size(); ++i) {
    for (size_t j = 0; j < clauses.size(); ++j) {
      if (i == j || dropped[j] || dropped[i]) continue;
      if (clause_implies(schema, clauses[i], clauses[j]) &&
          (j < i || !clause_implies(schema, clauses[j], clauses[i]))) {
        dropped[i] = true;
      }
    }
  }
  std::vector<Clause> kept;
  for (size_t i = 0; i < clauses.size(); ++i)
    if (!dropped[i]) kept.push_back(std::move(clauses[i]));
  clauses = std::move(kept);
}

}  // namespace

Statement conjoin_negation(const Schema& schema, const Statement& p,
                           const Statement& q) {
  Statement qrev = reverse_statement(q);
  std::vector<Clause> clauses = p.clauses;
  for (const auto& cq : qrev.clauses) {
    std::vector<Clause> next;
    for (const auto& c : clauses) {
      auto push = [&](Clause&& cand) {
        normalize_clause(schema, cand);
        if (!clause_satisfiable(schema, cand)) return;
        if (std::find(next.begin(), next.end(), cand) == next.end())
          next.push_back(std::move(cand));
      };
      for (const auto& pr : cq.better) {
        Clause cand = c;
        cand.better.push_back(flipped(pr));
        push(std::move(cand));
      }
      for (const auto& pr : cq.worse) {
        Clause cand = c;
        cand.worse.push_back(flipped(pr));
        push(std::move(cand));
      }
    }
    if (next.size() > 16 * kMaxClausesPerStatement)
      fail(ErrorKind::kCapacityExceeded,
           "DNF expansion of " + p.id + " ! " + q.id + " too large");
    clauses = std::move(next);
  }
  drop_subsumed_clauses(schema, clauses);
  if (clauses.size() > kMaxClausesPerStatement)
    fail(ErrorKind::kCapacityExceeded,
         "statement " + p.id + " ! " + q.id + " exceeds clause cap");
  Statement out;
  out.id = p.id + "!" + q.id;
  out.clauses = std::move(clauses);
  return out;
}

Statement simplify_statement(const Schema& schema, Statement s) {
  Statement t;
  t.id = std::move(s.id);
  for (auto& c : s.clauses) {
    normalize_clause(schema, c);
    if (!clause_satisfiable(schema, c)) continue;
    if (std::find(t.clauses.begin(), t.clauses.end(), c) == t.clauses.end())
      t.clauses.push_back(std::move(c));
  }
  drop_subsumed_clauses(schema, t.clauses);
  if (t.clauses.size() > kMaxClausesPerStatement)
    fail(ErrorKind::kCapacityExceeded,
         "statement " + t.id + " exceeds clause cap");
  return t;
}

Formula simplify(const Formula& f) {
  const Schema& schema = *f.schema;
  Formula out;
  out.schema = f.schema;
  for (const auto& s : f.statements) {
    Statement t = simplify_statement(schema, s);
    if (!t.clauses.empty()) out.statements.push_back(std::move(t));
  }

  auto& sts = out.statements;
  std::vector<bool> dropped(sts.size(), false);
  for (size_t i = 0; i < sts.size(); ++i) {
    for (size_t j = 0; j < sts.size(); ++j) {
      if (i == j || dropped[i] || dropped[j]) continue;
      if (statement_implies(schema, sts[i], sts[j]) &&
          (j < i || !statement_implies(schema, sts[j], sts[i]))) {
        dropped[i] = true;
      }
    }
  }
  std::vector<Statement> kept;
  for (size_t i = 0; i < sts.size(); ++i)
    if (!dropped[i]) kept.push_back(std::move(sts[i]));
  sts = std::move(kept);
  return out;
}

}  // namespace tpref
