#include "tpref/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "tpref/errors.hpp"
#include "tpref/rewrite.hpp"

namespace tpref {

TaxonomyKind taxonomy_kind_from_string(const std::string& s) {
  if (s == "regular") return TaxonomyKind::kRegular;
  if (s == "random") return TaxonomyKind::kRandom;
  if (s == "scale-free" || s == "scale_free") return TaxonomyKind::kScaleFree;
  fail(ErrorKind::kInvalidArgument, "unknown taxonomy kind: " + s);
}

PreferenceKind preference_kind_from_string(const std::string& s) {
  if (s == "conflicting") return PreferenceKind::kConflicting;
  if (s == "contextual") return PreferenceKind::kContextual;
  fail(ErrorKind::kInvalidArgument, "unknown preference kind: " + s);
}

std::string to_string(TaxonomyKind k) {
  switch (k) {
    case TaxonomyKind::kRegular: return "regular";
    case TaxonomyKind::kRandom: return "random";
    case TaxonomyKind::kScaleFree: return "scale-free";
  }
  return "?";
}

std::string to_string(PreferenceKind k) {
  return k == PreferenceKind::kConflicting ? "conflicting" : "contextual";
}

void BenchConfig::apply_key(const std::string& key, const std::string& value) {
  if (key == "taxonomy") taxonomy_kind = taxonomy_kind_from_string(value);
  else if (key == "fanout") fanout = std::stoul(value);
  else if (key == "depth") depth = std::stoul(value);
  else if (key == "exponent") exponent = std::stod(value);
  else if (key == "target_nodes") target_nodes = std::stoull(value);
  else if (key == "attrs") attrs = std::stoul(value);
  else if (key == "n") dataset_size = std::stoull(value);
  else if (key == "clauses") clauses = std::stoul(value);
  else if (key == "preferences") pref_kind = preference_kind_from_string(value);
  else if (key == "runs") runs = std::stoul(value);
  else if (key == "seed") base_seed = std::stoull(value);
  else if (key == "good_threshold") good_threshold = std::stod(value);
  else if (key == "sequences") {
    sequences.clear();
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) sequences.push_back(tok == "e" ? "" : tok);
  } else {
    fail(ErrorKind::kInvalidArgument, "unknown bench config key: " + key);
  }
}

BenchConfig BenchConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIoError, "cannot open bench config " + path);
  BenchConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::kMalformedLine, path + ": expected key = value: " + line);
    auto trim = [](std::string s) {
      size_t x = s.find_first_not_of(" \t");
      size_t y = s.find_last_not_of(" \t");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    cfg.apply_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

TRelation gen_dataset(SchemaPtr schema, uint64_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  TRelation rel;
  rel.schema = schema;
  rel.tuples.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    TTuple t(schema->size());
    for (size_t a = 0; a < schema->size(); ++a) {
      std::uniform_int_distribution<ValueId> dist(
          0, static_cast<ValueId>(schema->attr(a).taxonomy->size() - 1));
      t[a] = dist(rng);
    }
    rel.tuples.push_back(std::move(t));
  }
  return rel;
}

namespace {

// One conflicting pair on attribute 0: v1 > v2 among distinct maximal
// values, then v2' > v1 with v2' strictly below v2.
std::pair<Statement, Statement> conflicting_pair(const Schema& schema,
                                                 std::mt19937_64& rng,
                                                 int index) {
  const Taxonomy& tax = *schema.attr(0).taxonomy;
  const auto& roots = tax.roots();
  if (roots.size() < 2)
    fail(ErrorKind::kInsufficientRoots,
         "conflicting preferences need at least two maximal values");
  std::vector<ValueId> with_children;
  for (ValueId r : roots)
    if (!tax.children(r).empty()) with_children.push_back(r);
  if (with_children.empty())
    fail(ErrorKind::kInsufficientRoots,
         "no maximal value has a nonempty strict down-set");

  std::uniform_int_distribution<size_t> pick_v2(0, with_children.size() - 1);
  ValueId v2 = with_children[pick_v2(rng)];
  ValueId v1 = v2;
  std::uniform_int_distribution<size_t> pick_v1(0, roots.size() - 1);
  while (v1 == v2) v1 = roots[pick_v1(rng)];

  auto below = tax.down_set(v2);
  below.erase(std::remove(below.begin(), below.end(), v2), below.end());
  std::uniform_int_distribution<size_t> pick_v2p(0, below.size() - 1);
  ValueId v2p = below[pick_v2p(rng)];

  Statement p1, p2;
  p1.id = "P" + std::to_string(2 * index + 1);
  p1.clauses.push_back({{{0, Polarity::kLeq, v1}}, {{0, Polarity::kLeq, v2}}});
  p2.id = "P" + std::to_string(2 * index + 2);
  p2.clauses.push_back({{{0, Polarity::kLeq, v2p}}, {{0, Polarity::kLeq, v1}}});
  return {std::move(p1), std::move(p2)};
}

}  // namespace

Formula gen_conflicting(SchemaPtr schema, uint32_t pairs, uint64_t seed) {
  if (pairs == 0)
    fail(ErrorKind::kEmptyRequest, "requested zero preference pairs");
  std::mt19937_64 rng(seed);
  Formula f;
  f.schema = schema;
  for (uint32_t k = 0; k < pairs; ++k) {
    auto [p1, p2] = conflicting_pair(*schema, rng, static_cast<int>(k));
    f.statements.push_back(std::move(p1));
    f.statements.push_back(std::move(p2));
  }
  return f;
}

Formula gen_contextual(SchemaPtr schema, uint32_t d, uint64_t seed) {
  if (schema->size() < d)
    fail(ErrorKind::kInsufficientAttributes,
         "contextual preferences over " + std::to_string(d) +
             " attributes need a schema with at least as many");
  if (d == 0) fail(ErrorKind::kEmptyRequest, "contextual needs d >= 1");
  std::mt19937_64 rng(seed);
  auto [p1, p2] = conflicting_pair(*schema, rng, 0);
  for (uint32_t a = 1; a < d; ++a) {
    const Taxonomy& tax = *schema->attr(a).taxonomy;
    std::uniform_int_distribution<ValueId> dist(
        0, static_cast<ValueId>(tax.size() - 1));
    Predicate ctx{a, Polarity::kLeq, dist(rng)};
    for (Statement* s : {&p1, &p2}) {
      s->clauses[0].better.push_back(ctx);
      s->clauses[0].worse.push_back(ctx);
    }
  }
  Formula f;
  f.schema = schema;
  f.statements = {std::move(p1), std::move(p2)};
  return f;
}

namespace {

struct RunArtifacts {
  SchemaPtr schema;
  TRelation data;
  Formula formula;
};

RunArtifacts make_run(const BenchConfig& cfg, uint64_t seed) {
  std::vector<Schema::Attribute> attrs;
  for (uint32_t a = 0; a < cfg.attrs; ++a) {
    uint64_t tseed = mix_seed(seed, 0x7461780000ull + a);
    Taxonomy tax = [&] {
      switch (cfg.taxonomy_kind) {
        case TaxonomyKind::kRegular:
          return Taxonomy::regular(cfg.fanout, cfg.depth, tseed);
        case TaxonomyKind::kRandom:
          return Taxonomy::random_poisson(cfg.fanout, cfg.depth, tseed);
        case TaxonomyKind::kScaleFree:
          return Taxonomy::scale_free(cfg.target_nodes, cfg.exponent, tseed);
      }
      fail(ErrorKind::kInvalidArgument, "bad taxonomy kind");
    }();
    attrs.push_back({"A" + std::to_string(a + 1),
                     std::make_shared<Taxonomy>(std::move(tax))});
  }
  RunArtifacts run;
  run.schema = std::make_shared<Schema>(std::move(attrs));
  run.data = gen_dataset(run.schema, cfg.dataset_size, mix_seed(seed, 0x64617461));
  uint64_t pseed = mix_seed(seed, 0x70726566);
  if (cfg.pref_kind == PreferenceKind::kConflicting) {
    if (cfg.clauses % 2 != 0)
      fail(ErrorKind::kInvalidArgument,
           "conflicting preferences need an even clause count");
    run.formula = gen_conflicting(run.schema, cfg.clauses / 2, pseed);
  } else {
    run.formula = gen_contextual(run.schema, cfg.attrs, pseed);
  }
  return run;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<BenchRow> run_one(const BenchConfig& cfg, uint64_t seed) {
  RunArtifacts run = make_run(cfg, seed);
  std::vector<BenchRow> rows;
  for (const auto& word : cfg.sequences) {
    OperatorSequence seq = canonicalize(word);
    BenchRow row;
    row.seed = seed;
    row.sequence = word.empty() ? "e" : word;

    auto t0 = std::chrono::steady_clock::now();
    Formula g = apply_sequence(run.formula, seq);
    row.rewrite_ms = ms_since(t0);

    BestOptions opts;
    opts.naive = !seq.transitive();
    opts.heuristic = true;
    BestResult with_h = best(g, run.data, opts);
    row.best_ms_heuristic =
        std::chrono::duration<double, std::milli>(with_h.elapsed).count();
    opts.heuristic = false;
    BestResult without_h = best(g, run.data, opts);
    row.best_ms_plain =
        std::chrono::duration<double, std::milli>(without_h.elapsed).count();

    row.best_card = with_h.indices.size();
    row.relevant = with_h.relevant_count;
    row.best_indices_heuristic = std::move(with_h.indices);
    row.best_indices_plain = std::move(without_h.indices);
    rows.push_back(std::move(row));
  }
  // Good run: a minimal-transitive sequence keeps Best under the threshold.
  bool good = false;
  for (const auto& row : rows) {
    if (row.sequence != "TST" && row.sequence != "STST") continue;
    if (static_cast<double>(row.best_card) <
        cfg.good_threshold * static_cast<double>(cfg.dataset_size))
      good = true;
  }
  for (auto& row : rows) row.good_run = good;
  return rows;
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& cfg) {
  BenchResult result;
  result.config = cfg;
  if (cfg.runs == 0) return result;
  run_one(cfg, cfg.base_seed);  // warm-up, excluded from the result
  for (uint32_t r = 0; r < cfg.runs; ++r) {
    auto rows = run_one(cfg, cfg.base_seed + r);
    result.rows.insert(result.rows.end(),
                       std::make_move_iterator(rows.begin()),
                       std::make_move_iterator(rows.end()));
  }
  return result;
}

void write_csv(std::ostream& out, const BenchResult& result) {
  const BenchConfig& cfg = result.config;
  out << "seed,taxonomy_kind,fanout,depth,attrs,clauses,n,sequence,"
         "rewrite_ms,best_ms_plain,best_ms_heuristic,best_card,relevant,"
         "good_run\n";
  for (const auto& r : result.rows) {
    out << r.seed << ',' << to_string(cfg.taxonomy_kind) << ',' << cfg.fanout
        << ',' << cfg.depth << ',' << cfg.attrs << ',' << cfg.clauses << ','
        << cfg.dataset_size << ',' << r.sequence << ',' << r.rewrite_ms << ','
        << r.best_ms_plain << ',' << r.best_ms_heuristic << ',' << r.best_card
        << ',' << r.relevant << ',' << (r.good_run ? 1 : 0) << '\n';
  }
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

void write_summary(std::ostream& out, const BenchResult& result) {
  std::map<std::string, std::vector<const BenchRow*>> by_seq;
  for (const auto& r : result.rows) by_seq[r.sequence].push_back(&r);
  for (const auto& [seq, rows] : by_seq) {
    auto col = [&](auto getter) {
      std::vector<double> xs;
      for (const auto* r : rows) xs.push_back(getter(*r));
      double mean = 0;
      for (double x : xs) mean += x;
      mean /= xs.empty() ? 1 : xs.size();
      return std::pair<double, double>(mean, median(xs));
    };
    auto [rw_mean, rw_med] = col([](const BenchRow& r) { return r.rewrite_ms; });
    auto [bp_mean, bp_med] =
        col([](const BenchRow& r) { return r.best_ms_plain; });
    auto [bh_mean, bh_med] =
        col([](const BenchRow& r) { return r.best_ms_heuristic; });
    auto [bc_mean, bc_med] =
        col([](const BenchRow& r) { return double(r.best_card); });
    out << "# " << seq << ": rewrite_ms mean " << rw_mean << " median "
        << rw_med << "; best_ms_plain mean " << bp_mean << " median " << bp_med
        << "; best_ms_heuristic mean " << bh_mean << " median " << bh_med
        << "; best_card mean " << bc_mean << " median " << bc_med << '\n';
  }
}

}  // namespace tpref
