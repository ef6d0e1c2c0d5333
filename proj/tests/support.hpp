#pragma once

#include <algorithm>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tpref/eval.hpp"
#include "tpref/formula.hpp"
#include "tpref/oracle.hpp"
#include "tpref/taxonomy.hpp"

namespace tpref::test {

inline std::string fixture(const std::string& name) {
  return std::string(TPREF_FIXTURE_DIR) + "/" + name;
}

inline SchemaPtr wines_schema() {
  return Schema::load_file(fixture("wines_schema.cfg"));
}

inline TRelation wines_data(SchemaPtr schema) {
  return load_relation_file(fixture("wines_data.csv"), schema);
}

// Independent reachability oracle: BFS over parent edges, no use of the
// precomputed ancestor index.
inline bool bfs_leq(const Taxonomy& tax, ValueId a, ValueId b) {
  std::vector<char> seen(tax.size(), 0);
  std::vector<ValueId> stack{a};
  seen[a] = 1;
  while (!stack.empty()) {
    ValueId v = stack.back();
    stack.pop_back();
    if (v == b) return true;
    for (ValueId p : tax.parents(v))
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
  }
  return false;
}

// Naive common-descendant existence via down-set intersection.
inline bool naive_have_common_descendant(const Taxonomy& tax, ValueId a,
                                         ValueId b) {
  for (ValueId w = 0; w < tax.size(); ++w)
    if (bfs_leq(tax, w, a) && bfs_leq(tax, w, b)) return true;
  return false;
}

// Brute-force satisfiability of a one-variable conjunction by scanning the
// whole value product space of the referenced attribute.
inline bool naive_conj_satisfiable(const Schema& schema,
                                   const std::vector<Predicate>& conj) {
  // Group by attribute; each group quantifies independently.
  std::set<uint32_t> attrs;
  for (const auto& p : conj) attrs.insert(p.attr);
  for (uint32_t a : attrs) {
    const Taxonomy& tax = *schema.attr(a).taxonomy;
    bool found = false;
    for (ValueId v = 0; v < tax.size() && !found; ++v) {
      bool ok = true;
      for (const auto& p : conj) {
        if (p.attr != a) continue;
        bool le = tax.leq(v, p.value);
        if (le != (p.polarity == Polarity::kLeq)) { ok = false; break; }
      }
      found = ok;
    }
    if (!found) return false;
  }
  return true;
}

// Weak relation of a formula over an enumerated domain, straight from the
// tuple-level definition (no extension() reuse).
inline PairSet naive_relation(const Formula& f,
                              const std::vector<TTuple>& dom) {
  PairSet rel(dom.size());
  for (size_t i = 0; i < dom.size(); ++i)
    for (size_t j = 0; j < dom.size(); ++j)
      if (weak_pref(f, dom[i], dom[j])) rel.set(i, j);
  return rel;
}

// Random small instances for the oracle sweep: taxonomy of at most ~30
// values, 1-2 attributes, up to 3 statements and 4 clauses total.
struct RandomInstance {
  SchemaPtr schema;
  Formula formula;
};

inline Taxonomy random_small_taxonomy(std::mt19937_64& rng, int max_values) {
  std::uniform_int_distribution<int> nval(3, max_values);
  std::uniform_int_distribution<int> roots_dist(1, 3);
  int n = nval(rng);
  int nroots = std::min(n, roots_dist(rng));
  std::uniform_real_distribution<double> unit(0, 1);
  std::string csv;
  // value i may attach to any earlier value; occasionally to two of them.
  for (int i = 0; i < n; ++i) {
    std::string name = "w" + std::to_string(i);
    if (i < nroots) {
      csv += name + ",\n";
      continue;
    }
    std::uniform_int_distribution<int> parent(0, i - 1);
    int p1 = parent(rng);
    csv += name + ",w" + std::to_string(p1) + "\n";
    if (unit(rng) < 0.15) {
      int p2 = parent(rng);
      if (p2 != p1) csv += name + ",w" + std::to_string(p2) + "\n";
    }
  }
  std::istringstream in(csv);
  return Taxonomy::load(in, "rnd");
}

inline RandomInstance random_instance(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nattr_dist(1, 2);
  int nattr = nattr_dist(rng);
  std::vector<Schema::Attribute> attrs;
  for (int a = 0; a < nattr; ++a) {
    int max_values = nattr == 1 ? 24 : 12;
    attrs.push_back({"A" + std::to_string(a + 1),
                     std::make_shared<Taxonomy>(
                         random_small_taxonomy(rng, max_values))});
  }
  auto schema = std::make_shared<Schema>(std::move(attrs));

  std::uniform_int_distribution<int> nstmt_dist(1, 3);
  std::uniform_real_distribution<double> unit(0, 1);
  int nstmt = nstmt_dist(rng);
  int clause_budget = 4;

  auto random_pred = [&](uint32_t attr) {
    const Taxonomy& tax = *schema->attr(attr).taxonomy;
    std::uniform_int_distribution<ValueId> val(
        0, static_cast<ValueId>(tax.size() - 1));
    Polarity pol = unit(rng) < 0.3 ? Polarity::kNotLeq : Polarity::kLeq;
    return Predicate{attr, pol, val(rng)};
  };
  auto random_conj = [&] {
    std::vector<Predicate> conj;
    std::uniform_int_distribution<uint32_t> attr_dist(
        0, static_cast<uint32_t>(schema->size() - 1));
    int npred = unit(rng) < 0.6 ? 1 : 2;
    for (int i = 0; i < npred; ++i) conj.push_back(random_pred(attr_dist(rng)));
    return conj;
  };

  Formula f;
  f.schema = schema;
  for (int s = 0; s < nstmt; ++s) {
    Statement st;
    st.id = "P" + std::to_string(s + 1);
    int nclauses = (s + 1 < nstmt || clause_budget <= 1)
                       ? 1
                       : (unit(rng) < 0.7 ? 1 : 2);
    for (int c = 0; c < nclauses && clause_budget > 0; ++c) {
      for (int attempt = 0; attempt < 50; ++attempt) {
        Clause cl{random_conj(), random_conj()};
        normalize_clause(*schema, cl);
        if (!clause_satisfiable(*schema, cl)) continue;
        st.clauses.push_back(std::move(cl));
        --clause_budget;
        break;
      }
    }
    if (!st.clauses.empty()) f.statements.push_back(std::move(st));
  }
  if (f.statements.empty()) return random_instance(seed + 7919);
  return {schema, f};
}

}  // namespace tpref::test
