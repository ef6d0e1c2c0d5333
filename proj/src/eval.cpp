#include "tpref/eval.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace tpref {

bool weak_pref(const Formula& f, const TTuple& t1, const TTuple& t2) {
  const Schema& schema = *f.schema;
  for (const auto& s : f.statements)
    for (const auto& c : s.clauses)
      if (matches(schema, t1, c.better) && matches(schema, t2, c.worse))
        return true;
  return false;
}

bool strict_pref(const Formula& f, const TTuple& t1, const TTuple& t2) {
  return weak_pref(f, t1, t2) && !weak_pref(f, t2, t1);
}

bool relevant(const Formula& f, const TTuple& t) {
  const Schema& schema = *f.schema;
  for (const auto& s : f.statements)
    for (const auto& c : s.clauses)
      if (matches(schema, t, c.better) || matches(schema, t, c.worse))
        return true;
  return false;
}

uint64_t height_index(const Formula& f, const TTuple& t) {
  const Schema& schema = *f.schema;
  uint64_t hi = kInfiniteHeight;
  for (const auto& s : f.statements) {
    for (const auto& c : s.clauses) {
      if (!matches(schema, t, c.better)) continue;
      for (const auto& p : c.better) {
        if (p.polarity != Polarity::kLeq) continue;
        hi = std::min<uint64_t>(hi, schema.attr(p.attr).taxonomy->height(p.value));
      }
    }
  }
  return hi;
}

namespace {

// Per-tuple bitmasks of the clauses whose better/worse side the tuple
// matches; weak preference then reduces to a word-wise AND. Distinct
// (attribute, value) atoms are evaluated once per tuple, so rewritten
// formulas with many clauses over few values stay cheap to index.
struct ClauseMatchIndex {
  size_t words = 0;
  std::vector<uint64_t> better, worse;            // tuple-major, `words` each
  std::vector<uint64_t> clause_min_height;        // per clause, LEQ values only

  ClauseMatchIndex(const Formula& f, const TRelation& r) {
    const Schema& schema = *f.schema;
    std::vector<const Clause*> clauses;
    for (const auto& s : f.statements)
      for (const auto& c : s.clauses) clauses.push_back(&c);
    words = (clauses.size() + 63) / 64;
    better.assign(r.tuples.size() * words, 0);
    worse.assign(r.tuples.size() * words, 0);
    clause_min_height.reserve(clauses.size());
    for (const Clause* c : clauses) {
      uint64_t h = kInfiniteHeight;
      for (const auto& p : c->better)
        if (p.polarity == Polarity::kLeq)
          h = std::min<uint64_t>(h, schema.attr(p.attr).taxonomy->height(p.value));
      clause_min_height.push_back(h);
    }

    std::vector<std::pair<uint32_t, ValueId>> atoms;
    auto atom_of = [&](const Predicate& p) {
      std::pair<uint32_t, ValueId> key{p.attr, p.value};
      auto it = std::find(atoms.begin(), atoms.end(), key);
      if (it == atoms.end()) {
        atoms.push_back(key);
        return atoms.size() - 1;
      }
      return static_cast<size_t>(it - atoms.begin());
    };
    const size_t awords_guess = 4;
    auto side_masks = [&](const std::vector<Predicate>& side) {
      std::vector<uint64_t> require(awords_guess, 0), forbid(awords_guess, 0);
      for (const auto& p : side) {
        size_t a = atom_of(p);
        auto& dst = p.polarity == Polarity::kLeq ? require : forbid;
        if (a / 64 >= dst.size()) dst.resize(a / 64 + 1, 0);
        dst[a / 64] |= uint64_t{1} << (a % 64);
      }
      return std::pair(require, forbid);
    };
    std::vector<std::vector<uint64_t>> req_b, forb_b, req_w, forb_w;
    for (const Clause* c : clauses) {
      auto [rb, fb] = side_masks(c->better);
      auto [rw, fw] = side_masks(c->worse);
      req_b.push_back(rb); forb_b.push_back(fb);
      req_w.push_back(rw); forb_w.push_back(fw);
    }
    const size_t awords = (atoms.size() + 63) / 64;
    auto covered = [&](const std::vector<uint64_t>& need,
                       const std::vector<uint64_t>& truth, bool want) {
      for (size_t k = 0; k < need.size(); ++k) {
        uint64_t t = k < truth.size() ? truth[k] : 0;
        if (want ? (need[k] & t) != need[k] : (need[k] & t) != 0) return false;
      }
      return true;
    };

    std::vector<uint64_t> truth(awords);
    auto fill_masks = [&](const TTuple& t, uint64_t* brow, uint64_t* wrow) {
      std::fill(truth.begin(), truth.end(), 0);
      for (size_t a = 0; a < atoms.size(); ++a)
        if (schema.attr(atoms[a].first)
                .taxonomy->leq(t[atoms[a].first], atoms[a].second))
          truth[a / 64] |= uint64_t{1} << (a % 64);
      for (size_t c = 0; c < clauses.size(); ++c) {
        if (covered(req_b[c], truth, true) && covered(forb_b[c], truth, false))
          brow[c / 64] |= uint64_t{1} << (c % 64);
        if (covered(req_w[c], truth, true) && covered(forb_w[c], truth, false))
          wrow[c / 64] |= uint64_t{1} << (c % 64);
      }
    };

    if (schema.size() == 1 && words > 0) {
      // Single-attribute relations: compute each clause side as a bitset
      // over the value space (intersection of atom down-sets), scatter
      // into per-value clause masks, then copy per tuple.
      const Taxonomy& tax = *schema.attr(0).taxonomy;
      const size_t nvalues = tax.size();
      const size_t vwords = (nvalues + 63) / 64;
      std::vector<std::vector<uint64_t>> atom_down(
          atoms.size(), std::vector<uint64_t>(vwords, 0));
      for (size_t a = 0; a < atoms.size(); ++a)
        for (ValueId w : tax.down_set(atoms[a].second))
          atom_down[a][w / 64] |= uint64_t{1} << (w % 64);

      auto side_values = [&](const std::vector<uint64_t>& require,
                             const std::vector<uint64_t>& forbid) {
        std::vector<uint64_t> out(vwords, ~uint64_t{0});
        if (nvalues % 64) out.back() = (uint64_t{1} << (nvalues % 64)) - 1;
        for (size_t a = 0; a < atoms.size(); ++a) {
          bool req = a / 64 < require.size() && require[a / 64] >> (a % 64) & 1;
          bool forb = a / 64 < forbid.size() && forbid[a / 64] >> (a % 64) & 1;
          for (size_t k = 0; k < vwords; ++k) {
            if (req) out[k] &= atom_down[a][k];
            if (forb) out[k] &= ~atom_down[a][k];
          }
        }
        return out;
      };

      std::vector<uint64_t> vb(nvalues * words, 0), vw(nvalues * words, 0);
      for (size_t c = 0; c < clauses.size(); ++c) {
        auto scatter = [&](const std::vector<uint64_t>& vals,
                           std::vector<uint64_t>& rows) {
          for (size_t k = 0; k < vwords; ++k) {
            uint64_t word = vals[k];
            while (word) {
              size_t v = k * 64 + static_cast<size_t>(std::countr_zero(word));
              word &= word - 1;
              rows[v * words + c / 64] |= uint64_t{1} << (c % 64);
            }
          }
        };
        scatter(side_values(req_b[c], forb_b[c]), vb);
        scatter(side_values(req_w[c], forb_w[c]), vw);
      }
      for (size_t i = 0; i < r.tuples.size(); ++i) {
        ValueId v = r.tuples[i][0];
        std::copy_n(&vb[v * words], words, &better[i * words]);
        std::copy_n(&vw[v * words], words, &worse[i * words]);
      }
    } else if (words > 0) {
      for (size_t i = 0; i < r.tuples.size(); ++i)
        fill_masks(r.tuples[i], &better[i * words], &worse[i * words]);
    }
  }

  bool weak(size_t a, size_t b) const {
    const uint64_t* ba = &better[a * words];
    const uint64_t* wb = &worse[b * words];
    for (size_t k = 0; k < words; ++k)
      if (ba[k] & wb[k]) return true;
    return false;
  }

  bool is_relevant(size_t i) const {
    for (size_t k = 0; k < words; ++k)
      if (better[i * words + k] | worse[i * words + k]) return true;
    return false;
  }

  uint64_t height_index(size_t i) const {
    uint64_t hi = kInfiniteHeight;
    for (size_t k = 0; k < words; ++k) {
      uint64_t word = better[i * words + k];
      while (word) {
        size_t c = k * 64 + static_cast<size_t>(std::countr_zero(word));
        word &= word - 1;
        hi = std::min(hi, clause_min_height[c]);
      }
    }
    return hi;
  }
};

}  // namespace

BestResult best(const Formula& f, const TRelation& r, const BestOptions& opts) {
  BestResult res;
  auto start = std::chrono::steady_clock::now();

  ClauseMatchIndex index(f, r);

  std::vector<size_t> order;
  order.reserve(r.tuples.size());
  for (size_t i = 0; i < r.tuples.size(); ++i) {
    if (index.is_relevant(i)) {
      ++res.relevant_count;
      order.push_back(i);
    } else if (opts.keep_irrelevant) {
      order.push_back(i);
    }
  }

  if (opts.heuristic) {
    // Stable bucket sort by height index; distinct heights stay tiny.
    std::map<uint64_t, std::vector<size_t>> buckets;
    for (size_t i : order) buckets[index.height_index(i)].push_back(i);
    order.clear();
    for (auto& [hi, bucket] : buckets)
      order.insert(order.end(), bucket.begin(), bucket.end());
  }

  auto strict = [&](size_t a, size_t b) {
    ++res.comparisons;
    return index.weak(a, b) && !index.weak(b, a);
  };

  std::vector<size_t> window;
  if (opts.naive) {
    for (size_t i : order) {
      bool dominated = false;
      for (size_t j : order) {
        if (i == j) continue;
        if (strict(j, i)) { dominated = true; break; }
      }
      if (!dominated) window.push_back(i);
    }
  } else {
    for (size_t t : order) {
      bool dominated = false;
      for (size_t w : window) {
        if (strict(w, t)) { dominated = true; break; }
      }
      if (dominated) continue;
      window.erase(std::remove_if(window.begin(), window.end(),
                                  [&](size_t w) { return strict(t, w); }),
                   window.end());
      window.push_back(t);
    }
  }

  std::sort(window.begin(), window.end());
  res.indices = window;
  res.tuples.reserve(window.size());
  for (size_t i : window) res.tuples.push_back(r.tuples[i]);
  res.elapsed = std::chrono::steady_clock::now() - start;
  return res;
}

std::pair<std::vector<size_t>, std::vector<size_t>> diff_best(
    const Formula& f, const OperatorSequence& seqA, const OperatorSequence& seqB,
    const TRelation& r) {
  auto run = [&](const OperatorSequence& seq) {
    Formula g = apply_sequence(f, seq);
    BestOptions opts;
    opts.naive = !seq.transitive();
    return best(g, r, opts).indices;
  };
  std::vector<size_t> a = run(seqA);
  std::vector<size_t> b = run(seqB);
  std::vector<size_t> ab, ba;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(ab));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                      std::back_inserter(ba));
  return {ab, ba};
}

}  // namespace tpref
