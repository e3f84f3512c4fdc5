// mgram: generate data, select grams, build indexes, answer queries and run
// the benchmark experiments from the command line.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mgram/baselines.hpp"
#include "mgram/experiments.hpp"
#include "mgram/index.hpp"
#include "mgram/lpms.hpp"
#include "mgram/matcher.hpp"
#include "mgram/metrics.hpp"
#include "mgram/synthgen.hpp"

using namespace mgram;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Streams to a file, or to stdout for an empty path or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    try {
      out.push_back(std::stoul(item, &used));
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != item.size()) throw CLI::ValidationError("list", "not a number: " + item);
  }
  return out;
}

struct SelectionFlags {
  std::string mode = "lpms-d";
  std::size_t min_len = 2;
  std::size_t class_window = 3;
  std::size_t instantiation_cap = 4096;
  std::uint64_t seed = 0;
  double selectivity = 0.1;
  std::size_t top_k = 100;
  std::string benefit = "pruned";
  std::size_t node_limit = 1'000'000;

  void add_to(CLI::App* app) {
    app->add_option("--min-len", min_len, "shortest gram considered")->capture_default_str();
    app->add_option("--class-window", class_window, "longest class window enumerated")
        ->capture_default_str();
    app->add_option("--instantiation-cap", instantiation_cap,
                    "per-key limit on class instantiations")
        ->capture_default_str();
    app->add_option("--seed", seed, "seed for randomized rounding")->capture_default_str();
    app->add_option("--selectivity", selectivity, "FREE usefulness threshold")
        ->capture_default_str();
    app->add_option("--top-k", top_k, "BEST gram budget")->capture_default_str();
    app->add_option("--benefit", benefit, "BEST benefit model")
        ->check(CLI::IsMember({"pruned", "matched"}))
        ->capture_default_str();
    app->add_option("--node-limit", node_limit, "IPMS branch-and-bound node limit")
        ->capture_default_str();
  }

  SelectionParams params() const {
    SelectionParams p;
    p.min_len = min_len;
    p.class_window = class_window;
    p.instantiation_cap = instantiation_cap;
    p.seed = seed;
    p.selectivity = selectivity;
    p.top_k = top_k;
    p.benefit = parse_benefit(benefit);
    p.node_limit = node_limit;
    return p;
  }
};

// --- gen-corpus -------------------------------------------------------------

struct GenCorpusCmd {
  std::string spec_file, out, planted_out;
  CorpusSpec spec;
  std::string alphabet = "A-Z";
  std::string distribution = "none";

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("gen-corpus", "generate a synthetic corpus");
    c->add_option("--spec", spec_file, "key=value spec file; flags override it");
    c->add_option("--alphabet", alphabet, "alphabet, ranges like A-Z allowed");
    c->add_option("--records", spec.record_count, "number of records");
    c->add_option("--min-len", spec.min_record_len, "shortest record");
    c->add_option("--max-len", spec.max_record_len, "longest record");
    c->add_option("--distribution", distribution, "planted gram supports")
        ->check(CLI::IsMember({"none", "normal"}));
    c->add_option("--mean", spec.mean, "mean of the support draws");
    c->add_option("--sd", spec.sd, "standard deviation of the support draws");
    c->add_option("--grams", spec.gram_count, "number of planted grams");
    c->add_option("--seed", spec.seed, "random seed");
    c->add_option("--out", out, "corpus file (default stdout)");
    c->add_option("--planted", planted_out, "write planted grams and supports here");
    c->callback([this, c] { run(c); });
  }

  void run(CLI::App* c) {
    if (!spec_file.empty()) {
      CorpusSpec file_spec = load_corpus_spec(spec_file);
      // Flags given explicitly win over the file.
      if (!c->count("--alphabet")) alphabet = file_spec.alphabet;
      if (!c->count("--records")) spec.record_count = file_spec.record_count;
      if (!c->count("--min-len")) spec.min_record_len = file_spec.min_record_len;
      if (!c->count("--max-len")) spec.max_record_len = file_spec.max_record_len;
      if (!c->count("--distribution")) {
        distribution = file_spec.distribution == SupportDistribution::kNormal ? "normal" : "none";
      }
      if (!c->count("--mean")) spec.mean = file_spec.mean;
      if (!c->count("--sd")) spec.sd = file_spec.sd;
      if (!c->count("--grams")) spec.gram_count = file_spec.gram_count;
      if (!c->count("--seed")) spec.seed = file_spec.seed;
    }
    spec.alphabet = expand_alphabet(alphabet);
    spec.distribution =
        distribution == "normal" ? SupportDistribution::kNormal : SupportDistribution::kNone;
    const GeneratedCorpus g = gen_corpus_detailed(spec);
    Output o(out);
    for (const auto& r : g.corpus.records()) o.stream() << r << '\n';
    if (!planted_out.empty()) {
      Output p(planted_out);
      p.stream() << "gram,support\n";
      for (const auto& gs : g.planted) p.stream() << gs.gram << ',' << gs.support << '\n';
    }
  }
};

// --- gen-workload -----------------------------------------------------------

struct GenWorkloadCmd {
  std::string corpus_path, spec_file, out;
  WorkloadSpec spec;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("gen-workload", "cut gap-constrained queries from records");
    c->add_option("--corpus", corpus_path, "corpus file")->required();
    c->add_option("--spec", spec_file, "key=value spec file; flags override it");
    c->add_option("--keys", spec.key_count, "keys per query");
    c->add_option("--min-key-len", spec.min_key_len, "shortest key");
    c->add_option("--max-key-len", spec.max_key_len, "longest key");
    c->add_option("--max-gap", spec.max_gap, "largest distance between cut keys");
    c->add_option("--sample-fraction", spec.sample_fraction, "share of records sampled");
    c->add_option("--max-queries", spec.max_queries, "stop after this many (0 = no cap)");
    c->add_option("--seed", spec.seed, "random seed");
    c->add_option("--out", out, "query file (default stdout)");
    c->callback([this, c] { run(c); });
  }

  void run(CLI::App* c) {
    if (!spec_file.empty()) {
      const WorkloadSpec f = load_workload_spec(spec_file);
      if (!c->count("--keys")) spec.key_count = f.key_count;
      if (!c->count("--min-key-len")) spec.min_key_len = f.min_key_len;
      if (!c->count("--max-key-len")) spec.max_key_len = f.max_key_len;
      if (!c->count("--max-gap")) spec.max_gap = f.max_gap;
      if (!c->count("--sample-fraction")) spec.sample_fraction = f.sample_fraction;
      if (!c->count("--max-queries")) spec.max_queries = f.max_queries;
      if (!c->count("--seed")) spec.seed = f.seed;
    }
    const Corpus corpus = load_corpus(corpus_path);
    const GeneratedWorkload w = gen_workload(corpus, spec);
    if (w.skipped > 0) {
      std::cerr << "skipped " << w.skipped << " sampled records too short for "
                << spec.key_count << " keys\n";
    }
    Output o(out);
    for (const auto& line : w.lines) o.stream() << line << '\n';
  }
};

// --- build ------------------------------------------------------------------

struct BuildCmd {
  std::string corpus_path, queries_path, out, index_out, benefit_csv;
  SelectionFlags flags;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("build", "select grams and optionally build the index");
    c->add_option("--mode", flags.mode, "selection algorithm")
        ->check(CLI::IsMember({"ipms", "lpms-d", "lpms-r", "free", "best"}))
        ->capture_default_str();
    c->add_option("--corpus", corpus_path, "corpus file")->required();
    c->add_option("--queries", queries_path, "query workload (not needed for free)");
    c->add_option("--out", out, "selection file (default stdout)");
    c->add_option("--index", index_out, "also build and save the index here");
    c->add_option("--benefit-csv", benefit_csv, "best: write the benefit table here");
    flags.add_to(c);
    c->callback([this] { run(); });
  }

  void run() {
    const SelectionMode mode = parse_mode(flags.mode);
    if (queries_path.empty() && mode != SelectionMode::kFree) {
      throw CLI::RequiredError("--queries (needed by --mode " + flags.mode + ")");
    }
    const Corpus corpus = load_corpus(corpus_path);
    std::vector<SubQuery> sqs;
    if (!queries_path.empty()) sqs = expand_workload(load_queries(queries_path));
    const SelectionParams params = flags.params();
    const GramSelection sel = select_grams(mode, corpus, sqs, params);
    for (const auto& w : sel.warnings) std::cerr << "warning: " << w << '\n';
    Output o(out);
    write_selection(sel, o.stream());
    if (!benefit_csv.empty()) {
      Output b(benefit_csv);
      benefit_table(corpus, sqs, params).write_csv(b.stream());
    }
    if (!index_out.empty()) save_index(build_index(corpus, sel), index_out);
  }
};

// --- query ------------------------------------------------------------------

struct QueryCmd {
  std::string corpus_path, queries_path, index_path, out, stats_out;
  bool no_index = false;
  bool single_gram = false;
  std::size_t min_len = 2;
  std::size_t class_window = 3;
  std::size_t instantiation_cap = 4096;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("query", "answer a query workload");
    c->add_option("--corpus", corpus_path, "corpus file")->required();
    c->add_option("--queries", queries_path, "query workload")->required();
    auto* idx = c->add_option("--index", index_path, "index file");
    auto* none = c->add_flag("--no-index", no_index, "scan every record");
    idx->excludes(none);
    c->add_flag("--single-gram", single_gram,
                "use only the most selective indexed constraint per sub-query");
    c->add_option("--min-len", min_len, "shortest gram looked up")->capture_default_str();
    c->add_option("--class-window", class_window, "longest class window enumerated")
        ->capture_default_str();
    c->add_option("--instantiation-cap", instantiation_cap,
                  "per-key limit on class instantiations")
        ->capture_default_str();
    c->add_option("--out", out, "answer CSV (default stdout)");
    c->add_option("--stats", stats_out, "per-query statistics CSV");
    c->callback([this] { run(); });
  }

  void run() {
    if (index_path.empty() && !no_index) {
      throw CLI::RequiredError("--index or --no-index");
    }
    const Corpus corpus = load_corpus(corpus_path);
    const auto queries = load_queries(queries_path);
    std::optional<IndexArtifact> index;
    if (!index_path.empty()) {
      index = load_index(index_path);
      check_fingerprint(*index, corpus);
    }
    EvalOptions options;
    options.candidates.grams = {min_len, class_window, instantiation_cap};
    options.candidates.single_gram = single_gram;
    const auto answers =
        evaluate_all(index ? &*index : nullptr, corpus, queries, options);
    Output o(out);
    write_answers_csv(answers, o.stream());
    if (!stats_out.empty()) {
      Output s(stats_out);
      s.stream() << "query_id,used_index,partial,subqueries,candidates,matches\n";
      for (const auto& a : answers) {
        s.stream() << a.query_id << ',' << a.stats.used_index << ',' << a.stats.partial << ','
                   << a.stats.subqueries << ',' << a.stats.candidate_count << ','
                   << a.stats.verified_count << '\n';
      }
    }
  }
};

// --- verify -----------------------------------------------------------------

struct VerifyCmd {
  std::string index_path, corpus_path, queries_path;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("verify", "check an index against its corpus");
    c->add_option("--index", index_path, "index file")->required();
    c->add_option("--corpus", corpus_path, "corpus file")->required();
    c->add_option("--queries", queries_path,
                  "also check indexed answers against a full scan");
    c->callback([this] { run(); });
  }

  void run() {
    const IndexArtifact index = load_index(index_path);
    const Corpus corpus = load_corpus(corpus_path);
    check_fingerprint(index, corpus);
    if (!postings_match_corpus(index, corpus)) {
      throw InternalError("posting lists differ from the corpus");
    }
    std::cout << "postings: ok (" << index.size() << " grams, "
              << index.meta().total_postings << " entries)\n";
    if (index.meta().prefix_free) {
      std::vector<std::string> grams(index.grams().begin(), index.grams().end());
      if (const auto v = verify_prefix_free(grams)) {
        throw InternalError("'" + v->prefix + "' is a prefix of '" + v->longer + "'");
      }
      std::cout << "prefix-free: ok\n";
    }
    if (!queries_path.empty()) {
      const auto queries = load_queries(queries_path);
      const auto with = evaluate_all(&index, corpus, queries);
      const auto without = evaluate_all(nullptr, corpus, queries);
      for (std::size_t i = 0; i < queries.size(); ++i) {
        if (with[i].matched != without[i].matched) {
          throw InternalError("query " + std::to_string(i) +
                              ": indexed answer differs from full scan");
        }
      }
      const WorkloadMetrics m = compute_metrics(with, &index, without);
      std::cout << "answers: ok (" << queries.size() << " queries, hit rate " << m.hit_rate
                << ")\n";
    }
  }
};

// --- bench ------------------------------------------------------------------

struct BenchCmd {
  std::string out_dir = "bench-out";
  bool no_svg = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> records;
  std::optional<std::size_t> queries;

  Exp1Options e1;
  std::string e1_seeds;
  Exp2Options e2;
  std::string e2_sizes, e2_workloads;
  Exp3Options e3;
  std::string e3_benefit = "pruned";
  Exp4Options e4;
  std::string data_dir = "data/prosite";
  Exp5Options e5;

  void common(CLI::App* c) {
    c->add_option("--out", out_dir, "output directory")->capture_default_str();
    c->add_flag("--no-svg", no_svg, "skip plots");
    c->add_option("--seed", seed, "base random seed");
  }

  BenchOutput output() const { return {out_dir, !no_svg}; }

  void add(CLI::App& root) {
    auto* b = root.add_subcommand("bench", "run an experiment and write CSV files");
    b->require_subcommand(1);

    auto* x1 = b->add_subcommand("exp1", "hit rate and precision against support spread");
    common(x1);
    x1->add_option("--records", records, "records per dataset");
    x1->add_option("--queries", queries, "queries per dataset");
    x1->add_option("--seeds", e1_seeds, "comma-separated dataset seeds (default 1,2,3,4,5)");
    x1->add_option("--sds", e1.sds, "support standard deviations")->delimiter(',');
    x1->add_option("--free-selectivity", e1.free_selectivity, "FREE usefulness threshold")
        ->capture_default_str();
    x1->callback([this] {
      if (records) e1.records = *records;
      if (queries) e1.queries = *queries;
      if (!e1_seeds.empty()) {
        e1.seeds.clear();
        for (auto s : parse_size_list(e1_seeds)) e1.seeds.push_back(s);
      } else if (seed) {
        e1.seeds = {*seed};
      }
      report(run_exp1(e1, output()));
    });

    auto* x2 = b->add_subcommand("exp2", "selection time against corpus and workload size");
    common(x2);
    x2->add_option("--sizes", e2_sizes, "comma-separated corpus sizes");
    x2->add_option("--queries", queries, "workload size for the corpus-size sweep");
    x2->add_option("--records", records, "corpus size for the workload sweep");
    x2->add_option("--workloads", e2_workloads, "comma-separated workload sizes");
    x2->add_option("--repeats", e2.repeats, "timing repeats (median)")->capture_default_str();
    x2->callback([this] {
      if (seed) e2.seed = *seed;
      if (queries) e2.size_queries = *queries;
      if (records) e2.fixed_records = *records;
      if (!e2_sizes.empty()) e2.corpus_sizes = parse_size_list(e2_sizes);
      if (!e2_workloads.empty()) e2.workload_sizes = parse_size_list(e2_workloads);
      report(run_exp2(e2, output()));
    });

    auto* x3 = b->add_subcommand("exp3", "index size of IPMS, LPMS-R and top-k BEST");
    common(x3);
    x3->add_option("--records", records, "corpus size");
    x3->add_option("--queries", queries, "workload size");
    x3->add_option("--benefit", e3_benefit, "BEST benefit model")
        ->check(CLI::IsMember({"pruned", "matched"}));
    x3->callback([this] {
      if (seed) e3.seed = *seed;
      if (records) e3.records = *records;
      if (queries) e3.queries = *queries;
      e3.benefit = parse_benefit(e3_benefit);
      report(run_exp3(e3, output()));
    });

    auto* x4 = b->add_subcommand("exp4", "hit rate on unseen queries across alphabets");
    common(x4);
    x4->add_option("--records", records, "records per dataset");
    x4->add_option("--tests", e4.test_workloads, "test workloads per dataset")
        ->capture_default_str();
    x4->callback([this] {
      if (seed) e4.seed = *seed;
      if (records) e4.records = *records;
      report(run_exp4(e4, output()));
    });

    auto* x5 = b->add_subcommand("exp5", "protein signatures with two minimum gram lengths");
    common(x5);
    x5->add_option("--data", data_dir, "directory with sequences.txt and signatures.txt")
        ->capture_default_str();
    x5->callback([this] {
      e5.sequences = std::filesystem::path(data_dir) / "sequences.txt";
      e5.signatures = std::filesystem::path(data_dir) / "signatures.txt";
      report(run_exp5(e5, output()));
    });
  }

  void report(const Exp1Result& r) {
    for (const auto& c : r.cells) {
      std::cout << "seed " << c.seed << " sd " << c.sd << ' ' << to_string(c.mode)
                << ": hit rate " << c.hit_rate << ", precision "
                << (c.precision_mean ? std::to_string(*c.precision_mean) : "-") << '\n';
    }
    done();
  }
  void report(const Exp2Result& r) {
    std::cout << "MGT fit R^2 " << r.mgt_r2 << ", MCT max/min " << r.mct_ratio
              << ", MCT increasing with workload: " << (r.mct_increasing ? "yes" : "no")
              << '\n';
    done();
  }
  void report(const Exp3Result& r) {
    for (const auto& row : r.rows) {
      std::cout << row.index_type << ": posting size " << row.posting_size << ", hit rate "
                << row.hit_rate << ", prefix-free " << (row.prefix_free ? 'Y' : 'N') << '\n';
    }
    done();
  }
  void report(const Exp4Result& r) {
    std::cout << r.rows.size() << " rows\n";
    done();
  }
  void report(const Exp5Result& r) {
    for (const auto& row : r.rows) {
      std::cout << "min_len " << row.min_len << ": hit rate " << row.hit_rate << ", "
                << row.correct_queries << '/' << row.queries << " correct\n";
    }
    done();
  }
  void done() const { std::cout << "wrote " << out_dir << '\n'; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multigram index selection and gap-constrained query evaluation"};
  app.require_subcommand(1);
  GenCorpusCmd gen_corpus_cmd;
  GenWorkloadCmd gen_workload_cmd;
  BuildCmd build_cmd;
  QueryCmd query_cmd;
  VerifyCmd verify_cmd;
  BenchCmd bench_cmd;
  gen_corpus_cmd.add(app);
  gen_workload_cmd.add(app);
  build_cmd.add(app);
  query_cmd.add(app);
  verify_cmd.add(app);
  bench_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "mgram: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kUsage: return kExitUsage;
      case ErrorKind::kData:
      case ErrorKind::kIo: return kExitData;
      case ErrorKind::kInternal: return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "mgram: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
