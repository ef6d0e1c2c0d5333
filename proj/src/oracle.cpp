#include "tpref/oracle.hpp"

#include <bit>
#include <sstream>

#include "json.hpp"
#include "tpref/errors.hpp"
#include "tpref/eval.hpp"

namespace tpref {

PairSet::PairSet(size_t n)
    : n_(n), words_per_row_((n + 63) / 64), bits_(n * words_per_row_, 0) {}

void PairSet::set(size_t a, size_t b) {
  bits_[a * words_per_row_ + b / 64] |= uint64_t{1} << (b % 64);
}

bool PairSet::test(size_t a, size_t b) const {
  return bits_[a * words_per_row_ + b / 64] >> (b % 64) & 1;
}

bool PairSet::empty() const {
  for (uint64_t w : bits_)
    if (w) return false;
  return true;
}

uint64_t PairSet::count() const {
  uint64_t c = 0;
  for (uint64_t w : bits_) c += std::popcount(w);
  return c;
}

PairSet& PairSet::operator|=(const PairSet& o) {
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
  return *this;
}

PairSet& PairSet::operator&=(const PairSet& o) {
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
  return *this;
}

PairSet& PairSet::subtract(const PairSet& o) {
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] &= ~o.bits_[i];
  return *this;
}

bool PairSet::subset_of(const PairSet& o) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~o.bits_[i]) return false;
  return true;
}

PairSet PairSet::compose(const PairSet& o) const {
  PairSet out(n_);
  for (size_t a = 0; a < n_; ++a) {
    const uint64_t* row = &bits_[a * words_per_row_];
    uint64_t* orow = &out.bits_[a * words_per_row_];
    for (size_t w = 0; w < words_per_row_; ++w) {
      uint64_t word = row[w];
      while (word) {
        size_t b = w * 64 + std::countr_zero(word);
        word &= word - 1;
        const uint64_t* brow = &o.bits_[b * words_per_row_];
        for (size_t k = 0; k < words_per_row_; ++k) orow[k] |= brow[k];
      }
    }
  }
  return out;
}

PairSet PairSet::reversed() const {
  PairSet out(n_);
  for (size_t a = 0; a < n_; ++a) {
    const uint64_t* row = &bits_[a * words_per_row_];
    for (size_t w = 0; w < words_per_row_; ++w) {
      uint64_t word = row[w];
      while (word) {
        size_t b = w * 64 + std::countr_zero(word);
        word &= word - 1;
        out.set(b, a);
      }
    }
  }
  return out;
}

PairSet PairSet::transitive_closure() const {
  PairSet cur = *this;
  while (true) {
    PairSet step = cur.compose(cur);
    step |= cur;
    if (step == cur) return cur;
    cur = std::move(step);
  }
}

PairSet PairSet::strict() const {
  PairSet out = *this;
  out.subtract(reversed());
  return out;
}

bool PairSet::irreflexive() const {
  for (size_t a = 0; a < n_; ++a)
    if (test(a, a)) return false;
  return true;
}

bool PairSet::transitive() const {
  PairSet step = compose(*this);
  return step.subset_of(*this);
}

std::vector<std::pair<size_t, size_t>> PairSet::pairs(size_t limit) const {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t a = 0; a < n_ && out.size() < limit; ++a) {
    const uint64_t* row = &bits_[a * words_per_row_];
    for (size_t w = 0; w < words_per_row_ && out.size() < limit; ++w) {
      uint64_t word = row[w];
      while (word && out.size() < limit) {
        size_t b = w * 64 + std::countr_zero(word);
        word &= word - 1;
        out.emplace_back(a, b);
      }
    }
  }
  return out;
}

std::vector<TTuple> enumerate_domain(const Schema& schema, uint64_t cap) {
  uint64_t n = schema.domain_size();
  if (n > cap)
    fail(ErrorKind::kDomainTooLarge,
         "domain has " + std::to_string(n) + " t-tuples, cap is " +
             std::to_string(cap));
  std::vector<TTuple> out;
  out.reserve(n);
  TTuple t(schema.size(), 0);
  while (true) {
    out.push_back(t);
    size_t i = schema.size();
    while (i > 0) {
      --i;
      if (++t[i] < schema.attr(i).taxonomy->size()) break;
      t[i] = 0;
      if (i == 0) return out;
    }
    if (schema.size() == 0) return out;
  }
}

PairSet extension(const Schema& schema, const Statement& s,
                  const std::vector<TTuple>& domain) {
  const size_t n = domain.size();
  PairSet out(n);
  for (const auto& c : s.clauses) {
    std::vector<size_t> b_idx, w_idx;
    for (size_t i = 0; i < n; ++i) {
      if (matches(schema, domain[i], c.better)) b_idx.push_back(i);
      if (matches(schema, domain[i], c.worse)) w_idx.push_back(i);
    }
    for (size_t a : b_idx)
      for (size_t b : w_idx) out.set(a, b);
  }
  return out;
}

PairSet ExtensionRelation::relation_union(size_t n) const {
  PairSet u(n);
  for (const auto& e : extensions) u |= e;
  return u;
}

ExtensionRelation make_extension_relation(const Formula& f,
                                          const std::vector<TTuple>& domain) {
  ExtensionRelation ext;
  for (const auto& s : f.statements) {
    ext.ids.push_back(s.id);
    ext.extensions.push_back(extension(*f.schema, s, domain));
  }
  return ext;
}

namespace {

constexpr size_t kMaxOracleExtensions = 20000;

// Mirrors the end-of-operator simplification: an extension contained in an
// earlier (or strictly larger) sibling drops.
void drop_subsumed(ExtensionRelation& ext) {
  const size_t n = ext.extensions.size();
  std::vector<bool> dropped(n, false);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j || dropped[i] || dropped[j]) continue;
      if (ext.extensions[i].subset_of(ext.extensions[j]) &&
          (j < i || !ext.extensions[j].subset_of(ext.extensions[i])))
        dropped[i] = true;
    }
  ExtensionRelation out;
  for (size_t i = 0; i < n; ++i)
    if (!dropped[i]) {
      out.ids.push_back(std::move(ext.ids[i]));
      out.extensions.push_back(std::move(ext.extensions[i]));
    }
  ext = std::move(out);
}

}  // namespace

ExtensionRelation oracle_T(const ExtensionRelation& input) {
  ExtensionRelation acc = input;
  const ExtensionRelation& orig = input;
  bool progress = true;
  while (progress) {
    progress = false;
    const size_t round_end = acc.extensions.size();
    for (size_t i = 0; i < round_end; ++i) {
      for (size_t j = 0; j < orig.extensions.size(); ++j) {
        PairSet comp = acc.extensions[i].compose(orig.extensions[j]);
        if (comp.empty()) continue;
        bool covered = false;
        for (const auto& e : acc.extensions)
          if (comp.subset_of(e)) { covered = true; break; }
        if (covered) continue;
        acc.ids.push_back(acc.ids[i] + "*" + orig.ids[j]);
        acc.extensions.push_back(std::move(comp));
        progress = true;
        if (acc.extensions.size() > kMaxOracleExtensions)
          fail(ErrorKind::kCapacityExceeded, "oracle T exceeds extension cap");
      }
    }
  }
  drop_subsumed(acc);
  return acc;
}

ExtensionRelation oracle_S(const ExtensionRelation& input) {
  ExtensionRelation cur = input;
  bool new_round = true;
  while (new_round && !cur.extensions.empty()) {
    new_round = false;
    const size_t n = cur.extensions.size();
    std::vector<PairSet> rev(n);
    for (size_t j = 0; j < n; ++j) rev[j] = cur.extensions[j].reversed();

    std::vector<std::vector<bool>> rev_implies(n, std::vector<bool>(n, false));
    for (size_t j = 0; j < n; ++j)
      for (size_t i = 0; i < n; ++i)
        if (i != j) rev_implies[j][i] = rev[j].subset_of(cur.extensions[i]);

    ExtensionRelation next;
    for (size_t i = 0; i < n; ++i) {
      PairSet e = cur.extensions[i];
      bool refined = false;
      for (size_t j = 0; j < n; ++j) {
        if (i == j || !rev_implies[j][i] || rev_implies[i][j]) continue;
        e.subtract(rev[j]);
        refined = true;
      }
      if (refined) new_round = true;
      if (!e.empty()) {
        next.ids.push_back(cur.ids[i]);
        next.extensions.push_back(std::move(e));
      }
    }
    cur = std::move(next);
  }
  drop_subsumed(cur);
  return cur;
}

std::vector<ExtensionRelation> oracle_sequence_stages(
    const ExtensionRelation& ext, const OperatorSequence& seq) {
  std::vector<ExtensionRelation> stages{ext};
  for (char op : seq.canonical)
    stages.push_back(op == 'T' ? oracle_T(stages.back())
                               : oracle_S(stages.back()));
  return stages;
}

std::vector<size_t> best_from_relation(const PairSet& weak) {
  PairSet strict = weak.strict();
  std::vector<size_t> out;
  for (size_t i = 0; i < weak.domain(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < weak.domain() && !dominated; ++j)
      if (strict.test(j, i)) dominated = true;
    if (!dominated) out.push_back(i);
  }
  return out;
}

bool EquivalenceReport::all_match() const {
  for (const auto& s : stages)
    if (!s.match) return false;
  return true;
}

EquivalenceReport check_equivalence(const Formula& f,
                                    const OperatorSequence& seq,
                                    uint64_t domain_cap) {
  const Schema& schema = *f.schema;
  std::vector<TTuple> domain = enumerate_domain(schema, domain_cap);
  // Dense pair sets over the domain square; keep the memory in check.
  if (domain.size() > 20000)
    fail(ErrorKind::kDomainTooLarge,
         "equivalence check needs pair sets over " +
             std::to_string(domain.size()) + "^2 tuples");

  std::vector<Formula> fstages = apply_sequence_stages(f, seq);
  std::vector<ExtensionRelation> ostages =
      oracle_sequence_stages(make_extension_relation(fstages[0], domain), seq);

  auto tuple_str = [&](size_t i) {
    std::string s = "(";
    for (size_t a = 0; a < schema.size(); ++a) {
      if (a) s += ",";
      s += schema.attr(a).taxonomy->value_name(domain[i][a]);
    }
    return s + ")";
  };

  EquivalenceReport report;
  report.seq = seq;
  for (size_t k = 0; k < fstages.size(); ++k) {
    StageReport sr;
    sr.stage = k == 0 ? "input" : seq.canonical.substr(0, k);
    PairSet frel(domain.size());
    for (const auto& s : fstages[k].statements)
      frel |= extension(schema, s, domain);
    PairSet orel = ostages[k].relation_union(domain.size());
    sr.formula_pairs = frel.count();
    sr.oracle_pairs = orel.count();
    sr.match = frel == orel;
    if (!sr.match) {
      PairSet only_f = frel;
      only_f.subtract(orel);
      for (auto [a, b] : only_f.pairs(10))
        sr.mismatches.push_back("formula-only " + tuple_str(a) + " >= " +
                                tuple_str(b));
      PairSet only_o = orel;
      only_o.subtract(frel);
      size_t room = sr.mismatches.size() < 10 ? 10 - sr.mismatches.size() : 0;
      for (auto [a, b] : only_o.pairs(room))
        sr.mismatches.push_back("oracle-only " + tuple_str(a) + " >= " +
                                tuple_str(b));
    }
    report.stages.push_back(std::move(sr));
  }
  return report;
}

std::string to_text(const EquivalenceReport& report) {
  std::ostringstream out;
  out << "sequence " << (report.seq.word.empty() ? "e" : report.seq.word)
      << " (canonical "
      << (report.seq.canonical.empty() ? "e" : report.seq.canonical) << ")\n";
  for (const auto& s : report.stages) {
    out << "  stage " << s.stage << ": "
        << (s.match ? "match" : "MISMATCH") << " (formula " << s.formula_pairs
        << " pairs, oracle " << s.oracle_pairs << " pairs)\n";
    for (const auto& m : s.mismatches) out << "    " << m << '\n';
  }
  out << (report.all_match() ? "all stages match" : "stage mismatch detected")
      << '\n';
  return out.str();
}

std::string to_json_lines(const EquivalenceReport& report) {
  std::ostringstream out;
  for (const auto& s : report.stages) {
    nlohmann::json j;
    j["sequence"] = report.seq.word;
    j["canonical"] = report.seq.canonical;
    j["stage"] = s.stage;
    j["match"] = s.match;
    j["formula_pairs"] = s.formula_pairs;
    j["oracle_pairs"] = s.oracle_pairs;
    if (!s.mismatches.empty()) j["mismatches"] = s.mismatches;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace tpref
