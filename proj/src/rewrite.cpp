#include "tpref/rewrite.hpp"

#include <algorithm>
#include <array>

#include "tpref/errors.hpp"

namespace tpref {

OperatorSequence canonicalize(const std::string& word) {
  for (char c : word)
    if (c != 'T' && c != 'S')
      fail(ErrorKind::kInvalidCharacter,
           std::string("sequence may contain only T and S, got '") + c + "'");
  std::string w = word;
  bool changed = true;
  while (changed) {
    changed = false;
    std::string out;
    for (char c : w) {
      if (!out.empty() && out.back() == c) {
        changed = true;
        continue;
      }
      out.push_back(c);
    }
    size_t at = out.find("TSTS");
    if (at != std::string::npos) {
      out.erase(at + 2, 2);
      changed = true;
    }
    w = std::move(out);
  }
  static const std::array<const char*, 8> kReps = {
      "", "T", "S", "TS", "ST", "TST", "STS", "STST"};
  if (std::find(kReps.begin(), kReps.end(), w) == kReps.end())
    fail(ErrorKind::kInvalidArgument, "non-canonical reduction of " + word);
  return {word, w};
}

namespace {

constexpr size_t kMaxStatements = 20000;

// Satisfiability of C_m^w(t) and C_q^b(t) for a shared middle tuple.
bool combinable(const Schema& schema, const Clause& cm, const Clause& cq) {
  std::vector<Predicate> mid = cm.worse;
  mid.insert(mid.end(), cq.better.begin(), cq.better.end());
  return conjunction_satisfiable(schema, mid);
}

}  // namespace

Formula apply_T(const Formula& f) {
  const Schema& schema = *f.schema;
  Formula acc = f;
  const std::vector<Statement>& original = f.statements;

  bool progress = true;
  while (progress) {
    progress = false;
    const size_t round_end = acc.statements.size();
    for (size_t i = 0; i < round_end; ++i) {
      for (const auto& pj : original) {
        const Statement& pi = acc.statements[i];
        Statement ns;
        ns.id = pi.id + "*" + pj.id;
        for (const auto& cm : pi.clauses)
          for (const auto& cq : pj.clauses)
            if (combinable(schema, cm, cq))
              ns.clauses.push_back({cm.better, cq.worse});
        if (ns.clauses.empty()) continue;
        // Keep the emitted statement's extension intact (sibling-level
        // cleanup only); a statement already covered by a single existing
        // statement is discarded and does not count as progress. This is
        // the termination guard: every kept statement carries a new
        // extension, and the extension lattice over a finite taxonomy is
        // finite.
        ns = simplify_statement(schema, std::move(ns));
        bool covered = false;
        for (const auto& s : acc.statements)
          if (statement_implies(schema, ns, s)) { covered = true; break; }
        if (covered) continue;
        acc.statements.push_back(std::move(ns));
        progress = true;
        if (acc.statements.size() > kMaxStatements)
          fail(ErrorKind::kCapacityExceeded,
               "transitive closure exceeds statement cap");
      }
    }
  }
  return simplify(acc);
}

Formula apply_S(const Formula& f) {
  const Schema& schema = *f.schema;
  Formula cur = f;

  bool new_round = true;
  while (new_round) {
    new_round = false;
    const auto& sts = cur.statements;
    const size_t n = sts.size();

    // rev_implies[j][i]: P_j(y,x) implies P_i(x,y).
    std::vector<std::vector<bool>> rev_implies(n, std::vector<bool>(n, false));
    for (size_t j = 0; j < n; ++j)
      for (size_t i = 0; i < n; ++i)
        if (i != j)
          rev_implies[j][i] =
              statement_implies_reversed(schema, sts[j], sts[i]);

    std::vector<Statement> next;
    next.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      std::vector<size_t> impl;
      for (size_t j = 0; j < n; ++j)
        if (i != j && rev_implies[j][i] && !rev_implies[i][j])
          impl.push_back(j);
      if (impl.empty()) {
        next.push_back(sts[i]);
        continue;
      }
      new_round = true;
      Statement replaced = sts[i];
      for (size_t j : impl)
        replaced = conjoin_negation(schema, replaced, sts[j]);
      if (!replaced.clauses.empty()) next.push_back(std::move(replaced));
    }
    cur.statements = std::move(next);
    if (cur.statements.empty()) break;
  }
  return simplify(cur);
}

Formula apply_sequence(const Formula& f, const OperatorSequence& seq) {
  return apply_sequence_stages(f, seq).back();
}

std::vector<Formula> apply_sequence_stages(const Formula& f,
                                           const OperatorSequence& seq) {
  std::vector<Formula> stages;
  if (seq.canonical.empty()) {
    stages.push_back(f);
    return stages;
  }
  stages.push_back(simplify(f));
  for (char op : seq.canonical)
    stages.push_back(op == 'T' ? apply_T(stages.back())
                               : apply_S(stages.back()));
  return stages;
}

}  // namespace tpref
