#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "tpref/bench.hpp"
#include "tpref/errors.hpp"
#include "tpref/eval.hpp"
#include "tpref/formula.hpp"
#include "tpref/oracle.hpp"
#include "tpref/rewrite.hpp"
#include "tpref/taxonomy.hpp"

namespace {

using namespace tpref;

// --formula accepts a file path or an inline DSL string.
Formula read_formula(const std::string& arg, SchemaPtr schema) {
  if (std::filesystem::exists(arg)) return load_formula_file(arg, schema);
  return parse_formula(arg, schema);
}

OperatorSequence read_seq(const std::string& word) {
  if (word == "e" || word == "eps" || word == "epsilon")
    return canonicalize("");
  return canonicalize(word);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) fail(ErrorKind::kIoError, "cannot open output file " + path);
  return file;
}

int cmd_rewrite(const std::string& schema_path, const std::string& formula_arg,
                const std::string& seq_word, const std::string& out_path) {
  SchemaPtr schema = Schema::load_file(schema_path);
  Formula f = read_formula(formula_arg, schema);
  OperatorSequence seq = read_seq(seq_word);
  Formula g = apply_sequence(f, seq);

  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  out << to_string(g);
  out << "# sequence: " << (seq.word.empty() ? "e" : seq.word) << '\n';
  out << "# canonical: " << (seq.canonical.empty() ? "e" : seq.canonical)
      << '\n';
  out << "# ids:";
  for (const auto& s : g.statements) out << ' ' << s.id;
  out << '\n';
  return 0;
}

int cmd_best(const std::string& schema_path, const std::string& formula_arg,
             const std::string& data_path, const std::string& seq_word,
             const std::string& out_path, bool heuristic, bool keep_irrelevant,
             bool stats) {
  SchemaPtr schema = Schema::load_file(schema_path);
  Formula f = read_formula(formula_arg, schema);
  OperatorSequence seq = read_seq(seq_word);
  TRelation data = load_relation_file(data_path, schema);

  Formula g = apply_sequence(f, seq);
  BestOptions opts;
  opts.heuristic = heuristic;
  opts.keep_irrelevant = keep_irrelevant;
  opts.naive = !seq.transitive();
  if (opts.naive)
    std::cerr << "warning: sequence '"
              << (seq.canonical.empty() ? "e" : seq.canonical)
              << "' does not end in T; using the definition scan instead of "
                 "BNL\n";
  BestResult res = best(g, data, opts);

  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  TRelation best_rel{schema, res.tuples};
  save_relation(out, best_rel);
  if (stats) {
    out << "# sequence: " << (seq.word.empty() ? "e" : seq.word) << '\n';
    out << "# canonical: " << (seq.canonical.empty() ? "e" : seq.canonical)
        << '\n';
    out << "# algorithm: " << (opts.naive ? "naive" : "bnl") << '\n';
    out << "# relevant: " << res.relevant_count << '\n';
    out << "# comparisons: " << res.comparisons << '\n';
    out << "# best: " << res.tuples.size() << '\n';
    out << "# elapsed_ms: "
        << std::chrono::duration<double, std::milli>(res.elapsed).count()
        << '\n';
  }
  return 0;
}

int cmd_check(const std::string& schema_path, const std::string& formula_arg,
              const std::string& seq_word, uint64_t max_domain,
              const std::string& out_path) {
  SchemaPtr schema = Schema::load_file(schema_path);
  Formula f = read_formula(formula_arg, schema);
  OperatorSequence seq = read_seq(seq_word);
  EquivalenceReport report = check_equivalence(f, seq, max_domain);
  std::cout << to_text(report);
  if (!out_path.empty()) {
    std::ofstream file;
    open_out(out_path, file) << to_json_lines(report);
  }
  return report.all_match() ? 0 : 1;
}

int cmd_gen_tax(const std::string& kind, uint32_t fanout, uint32_t depth,
                double exponent, uint64_t nodes, uint64_t seed,
                const std::string& out_path) {
  Taxonomy tax = [&] {
    switch (taxonomy_kind_from_string(kind)) {
      case TaxonomyKind::kRegular: return Taxonomy::regular(fanout, depth, seed);
      case TaxonomyKind::kRandom:
        return Taxonomy::random_poisson(fanout, depth, seed);
      case TaxonomyKind::kScaleFree:
        return Taxonomy::scale_free(nodes, exponent, seed);
    }
    fail(ErrorKind::kInvalidArgument, "bad kind");
  }();
  std::ofstream file;
  tax.save(open_out(out_path, file));
  return 0;
}

int cmd_gen_data(const std::string& schema_path, uint64_t n, uint64_t seed,
                 const std::string& out_path) {
  SchemaPtr schema = Schema::load_file(schema_path);
  TRelation rel = gen_dataset(schema, n, seed);
  std::ofstream file;
  save_relation(open_out(out_path, file), rel);
  return 0;
}

int cmd_gen_prefs(const std::string& schema_path, const std::string& kind,
                  uint32_t clauses, uint32_t attrs, uint64_t seed,
                  const std::string& out_path) {
  SchemaPtr schema = Schema::load_file(schema_path);
  Formula f;
  if (preference_kind_from_string(kind) == PreferenceKind::kConflicting) {
    if (clauses % 2 != 0)
      fail(ErrorKind::kInvalidArgument, "conflicting needs an even --clauses");
    f = gen_conflicting(schema, clauses / 2, seed);
  } else {
    f = gen_contextual(schema, attrs == 0 ? schema->size() : attrs, seed);
  }
  std::ofstream file;
  open_out(out_path, file) << to_string(f);
  return 0;
}

int cmd_bench(const std::string& config_path,
              const std::vector<std::string>& overrides, uint32_t runs,
              uint64_t seed, const std::string& out_path) {
  BenchConfig cfg = config_path.empty() ? BenchConfig()
                                        : BenchConfig::load_file(config_path);
  for (const auto& kv : overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::kInvalidArgument, "override must be key=value: " + kv);
    cfg.apply_key(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (runs) cfg.runs = runs;
  if (seed) cfg.base_seed = seed;
  BenchResult result = run_benchmark(cfg);
  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  write_csv(out, result);
  write_summary(out, result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference queries over taxonomic domains"};
  app.require_subcommand(1);

  std::string schema_path, formula_arg, data_path, out_path, config_path;
  std::string seq_word = "e";
  uint64_t seed = 1, max_domain = kDefaultDomainCap, n = 0;
  bool heuristic = true, keep_irrelevant = false, stats = false;

  auto* rewrite = app.add_subcommand("rewrite", "Rewrite a formula");
  rewrite->add_option("--schema", schema_path)->required();
  rewrite->add_option("--formula", formula_arg)->required();
  rewrite->add_option("--seq", seq_word);
  rewrite->add_option("--out", out_path);

  auto* bst = app.add_subcommand("best", "Best tuples of a dataset");
  bst->add_option("--schema", schema_path)->required();
  bst->add_option("--formula", formula_arg)->required();
  bst->add_option("--data", data_path)->required();
  bst->add_option("--seq", seq_word);
  bst->add_option("--out", out_path);
  bst->add_flag("--heuristic,!--no-heuristic", heuristic,
                "height-index presort (default on)");
  bst->add_flag("--keep-irrelevant", keep_irrelevant);
  bst->add_flag("--stats", stats);

  auto* check = app.add_subcommand("check", "Cross-validate against the oracle");
  check->add_option("--schema", schema_path)->required();
  check->add_option("--formula", formula_arg)->required();
  check->add_option("--seq", seq_word);
  check->add_option("--max-domain", max_domain);
  check->add_option("--out", out_path, "JSON-lines report file");

  std::string kind = "regular";
  uint32_t fanout = 5, depth = 6, clauses = 2, attrs = 0, runs = 0;
  double exponent = 2.7;
  uint64_t nodes = 15000;
  auto* gtax = app.add_subcommand("gen-tax", "Generate a synthetic taxonomy");
  gtax->add_option("--kind", kind, "regular|random|scale-free");
  gtax->add_option("--fanout", fanout);
  gtax->add_option("--depth", depth);
  gtax->add_option("--exponent", exponent);
  gtax->add_option("--nodes", nodes);
  gtax->add_option("--seed", seed);
  gtax->add_option("--out", out_path);

  auto* gdata = app.add_subcommand("gen-data", "Generate a uniform dataset");
  gdata->add_option("--schema", schema_path)->required();
  gdata->add_option("--n", n)->required();
  gdata->add_option("--seed", seed);
  gdata->add_option("--out", out_path);

  std::string pref_kind = "conflicting";
  auto* gprefs = app.add_subcommand("gen-prefs", "Generate preferences");
  gprefs->add_option("--schema", schema_path)->required();
  gprefs->add_option("--kind", pref_kind, "conflicting|contextual");
  gprefs->add_option("--clauses", clauses);
  gprefs->add_option("--attrs", attrs);
  gprefs->add_option("--seed", seed);
  gprefs->add_option("--out", out_path);

  std::vector<std::string> overrides;
  auto* bench = app.add_subcommand("bench", "Run the benchmark harness");
  bench->add_option("--config", config_path);
  bench->add_option("--set", overrides, "config overrides, key=value");
  bench->add_option("--runs", runs);
  bench->add_option("--seed", seed);
  bench->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (rewrite->parsed())
      return cmd_rewrite(schema_path, formula_arg, seq_word, out_path);
    if (bst->parsed())
      return cmd_best(schema_path, formula_arg, data_path, seq_word, out_path,
                      heuristic, keep_irrelevant, stats);
    if (check->parsed())
      return cmd_check(schema_path, formula_arg, seq_word, max_domain,
                       out_path);
    if (gtax->parsed())
      return cmd_gen_tax(kind, fanout, depth, exponent, nodes, seed, out_path);
    if (gdata->parsed()) return cmd_gen_data(schema_path, n, seed, out_path);
    if (gprefs->parsed())
      return cmd_gen_prefs(schema_path, pref_kind, clauses, attrs, seed,
                           out_path);
    if (bench->parsed())
      return cmd_bench(config_path, overrides, runs, seed, out_path);
  } catch (const tpref::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_resource_cap() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
