#include "mgram/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgram/baselines.hpp"
#include "mgram/index.hpp"
#include "mgram/matcher.hpp"
#include "mgram/metrics.hpp"
#include "mgram/svg.hpp"
#include "mgram/synthgen.hpp"

#ifndef MGRAM_VERSION
#define MGRAM_VERSION "unknown"
#endif

namespace mgram {
namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::json;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// splitmix64 finalizer; keeps the per-cell seeds of one run independent.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix(mix(mix(base) ^ a) ^ b);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// Writes files below the output directory and remembers them for the manifest.
class Sink {
 public:
  Sink(const BenchOutput& out, std::string experiment)
      : out_(out), manifest_{{"experiment", std::move(experiment)},
                             {"version", MGRAM_VERSION},
                             {"files", json::array()}} {
    if (enabled()) std::filesystem::create_directories(out_.dir);
  }

  bool enabled() const { return !out_.dir.empty(); }
  json& manifest() { return manifest_; }

  void csv(const std::string& name, const std::string& content) {
    if (!enabled()) return;
    write(name, content);
  }

  void svg(const std::string& name, const Chart& chart) {
    if (!enabled() || !out_.svg) return;
    std::ostringstream s;
    write_svg(chart, s);
    write(name, s.str());
  }

  void finish() {
    if (!enabled()) return;
    std::ofstream f(out_.dir / "manifest.json", std::ios::binary);
    if (!f) throw IoError("cannot write " + (out_.dir / "manifest.json").string());
    f << manifest_.dump(2) << '\n';
  }

 private:
  void write(const std::string& name, const std::string& content) {
    const auto path = out_.dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << content;
    manifest_["files"].push_back(name);
  }

  BenchOutput out_;
  json manifest_;
};

struct Workload {
  std::vector<RegexQuery> queries;
  std::vector<SubQuery> subqueries;
};

Workload make_workload(const Corpus& corpus, std::size_t queries, std::uint64_t seed,
                       std::size_t max_gap = 30) {
  WorkloadSpec spec;
  spec.seed = seed;
  spec.max_gap = max_gap;
  spec.max_queries = queries;
  spec.sample_fraction =
      std::min(1.0, 2.0 * static_cast<double>(queries) / static_cast<double>(corpus.size()));
  Workload w;
  w.queries = gen_workload(corpus, spec).queries;
  w.subqueries = expand_workload(w.queries);
  return w;
}

// One selection, index and evaluation against full-scan truth.
struct Trial {
  GramSelection selection;
  WorkloadMetrics metrics;
  double build_ms = 0.0;
  double query_ms = 0.0;
};

Trial run_trial(const Corpus& corpus, const Workload& w,
                const std::vector<QueryAnswer>& truth, SelectionMode mode,
                const SelectionParams& params) {
  Trial t;
  const auto start = Clock::now();
  t.selection = select_grams(mode, corpus, w.subqueries, params);
  const IndexArtifact index = build_index(corpus, t.selection);
  t.build_ms = ms_since(start);

  EvalOptions eval;
  eval.candidates.grams = params.gram_options();
  const auto q_start = Clock::now();
  const auto answers = evaluate_all(&index, corpus, w.queries, eval);
  t.query_ms = ms_since(q_start);
  t.metrics = compute_metrics(answers, &index, truth);
  return t;
}

std::vector<QueryAnswer> full_scan(const Corpus& corpus, const Workload& w) {
  return evaluate_all(nullptr, corpus, w.queries);
}

json params_json(const SelectionParams& p) {
  return {{"min_len", p.min_len},         {"class_window", p.class_window},
          {"instantiation_cap", p.instantiation_cap}, {"seed", p.seed},
          {"selectivity", p.selectivity}, {"top_k", p.top_k},
          {"benefit", to_string(p.benefit)}, {"node_limit", p.node_limit}};
}

json corpus_spec_json(const CorpusSpec& s) {
  return {{"alphabet", s.alphabet},
          {"records", s.record_count},
          {"min_len", s.min_record_len},
          {"max_len", s.max_record_len},
          {"distribution", s.distribution == SupportDistribution::kNormal ? "normal" : "none"},
          {"mean", s.mean},
          {"sd", s.sd},
          {"grams", s.gram_count},
          {"seed", s.seed}};
}

std::string mode_label(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kIpms: return "IPMS";
    case SelectionMode::kLpmsD: return "LPMS-D";
    case SelectionMode::kLpmsR: return "LPMS-R";
    case SelectionMode::kFree: return "FREE";
    case SelectionMode::kBest: return "BEST";
  }
  return "?";
}

}  // namespace

double linear_fit_r2(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DataError("linear fit needs two or more paired points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (syy == 0.0) return 1.0;
  if (sxx == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

// ---------------------------------------------------------------------------

const Exp1Cell* Exp1Result::find(std::uint64_t seed, double sd, SelectionMode mode) const {
  for (const auto& c : cells) {
    if (c.seed == seed && c.sd == sd && c.mode == mode) return &c;
  }
  return nullptr;
}

Exp1Result run_exp1(const Exp1Options& options, const BenchOutput& out) {
  Sink sink(out, "exp1");
  Exp1Result result;
  json cells = json::array();
  const SelectionMode modes[] = {SelectionMode::kFree, SelectionMode::kLpmsR,
                                 SelectionMode::kLpmsD};

  for (const std::uint64_t seed : options.seeds) {
    for (std::size_t si = 0; si < options.sds.size(); ++si) {
      const double sd = options.sds[si];
      CorpusSpec cs;
      cs.record_count = options.records;
      cs.min_record_len = options.min_record_len;
      cs.max_record_len = options.max_record_len;
      cs.distribution = SupportDistribution::kNormal;
      cs.sd = sd;
      cs.gram_count = options.gram_count;
      cs.seed = derive(seed, 1, si);
      const Corpus corpus = gen_corpus(cs);
      const std::uint64_t workload_seed = derive(seed, 2, si);
      const Workload w = make_workload(corpus, options.queries, workload_seed);
      const auto truth = full_scan(corpus, w);

      SelectionParams params;
      params.min_len = options.min_len;
      params.selectivity = options.free_selectivity;
      params.seed = derive(seed, 3, si);

      std::map<SelectionMode, WorkloadMetrics> by_mode;
      for (const SelectionMode mode : modes) {
        const Trial t = run_trial(corpus, w, truth, mode, params);
        Exp1Cell c;
        c.seed = seed;
        c.sd = sd;
        c.mode = mode;
        c.queries = t.metrics.queries;
        c.grams = t.selection.grams.size();
        c.hit_rate = t.metrics.hit_rate;
        c.precision_mean = t.metrics.precision_mean;
        c.precision_std = t.metrics.precision_std;
        c.recall_set = t.metrics.recall_set;
        c.correct_queries = t.metrics.correct_queries;
        c.posting_size = t.metrics.posting_size;
        c.build_ms = t.build_ms;
        c.query_ms = t.query_ms;
        result.cells.push_back(c);
        by_mode[mode] = t.metrics;
      }
      const auto& r = by_mode[SelectionMode::kLpmsR].precision;
      const auto& d = by_mode[SelectionMode::kLpmsD].precision;
      for (std::size_t q = 0; q < r.size(); ++q) {
        result.per_query.push_back({seed, sd, q, r[q], d[q]});
      }
      cells.push_back({{"seed", seed},
                       {"sd", sd},
                       {"corpus", corpus_spec_json(cs)},
                       {"corpus_fingerprint", fingerprint_hex(corpus.fingerprint())},
                       {"workload_seed", workload_seed},
                       {"queries", w.queries.size()},
                       {"params", params_json(params)}});
    }
  }

  if (sink.enabled()) {
    std::ostringstream csv, timings, pq;
    csv << "seed,sd,mode,queries,grams,hit_rate,precision_mean,precision_std,recall_set,"
           "correct_queries,posting_size\n";
    timings << "seed,sd,mode,build_ms,query_ms\n";
    for (const auto& c : result.cells) {
      csv << c.seed << ',' << fmt(c.sd) << ',' << to_string(c.mode) << ',' << c.queries
          << ',' << c.grams << ',' << fmt(c.hit_rate) << ',' << fmt(c.precision_mean) << ','
          << fmt(c.precision_std) << ',' << fmt(c.recall_set) << ',' << c.correct_queries
          << ',' << c.posting_size << '\n';
      timings << c.seed << ',' << fmt(c.sd) << ',' << to_string(c.mode) << ','
              << fmt(c.build_ms) << ',' << fmt(c.query_ms) << '\n';
    }
    pq << "seed,sd,query,precision_lpms_r,precision_lpms_d\n";
    for (const auto& p : result.per_query) {
      pq << p.seed << ',' << fmt(p.sd) << ',' << p.query << ',' << fmt(p.lpms_r) << ','
         << fmt(p.lpms_d) << '\n';
    }
    sink.csv("exp1.csv", csv.str());
    sink.csv("exp1_timings.csv", timings.str());
    sink.csv("exp1_query_precision.csv", pq.str());

    Chart hit{"Hit rate against support spread", "standard deviation", "hit rate", {}, false};
    Chart prec{"Mean precision against support spread", "standard deviation", "precision",
               {}, false};
    for (const SelectionMode mode : modes) {
      Series h{mode_label(mode), {}}, p{mode_label(mode), {}};
      for (const double sd : options.sds) {
        std::vector<double> hits, precs;
        for (const auto& c : result.cells) {
          if (c.mode != mode || c.sd != sd) continue;
          hits.push_back(c.hit_rate);
          if (c.precision_mean) precs.push_back(*c.precision_mean);
        }
        if (auto m = mean_of(hits)) h.points.emplace_back(sd, *m);
        if (auto m = mean_of(precs)) p.points.emplace_back(sd, *m);
      }
      hit.series.push_back(std::move(h));
      prec.series.push_back(std::move(p));
    }
    sink.svg("exp1_hit_rate.svg", hit);
    sink.svg("exp1_precision.svg", prec);

    // Per-query precision of the first dataset, queries ranked by LPMS-R.
    if (!result.per_query.empty()) {
      std::vector<Exp1QueryPrecision> first;
      for (const auto& p : result.per_query) {
        if (p.seed == result.per_query.front().seed && p.sd == result.per_query.front().sd &&
            p.lpms_r && p.lpms_d) {
          first.push_back(p);
        }
      }
      std::stable_sort(first.begin(), first.end(),
                       [](const auto& a, const auto& b) { return *a.lpms_r < *b.lpms_r; });
      Chart scatter{"Per-query precision", "query rank", "precision", {}, true};
      Series r{"LPMS-R", {}}, d{"LPMS-D", {}};
      for (std::size_t i = 0; i < first.size(); ++i) {
        r.points.emplace_back(static_cast<double>(i), *first[i].lpms_r);
        d.points.emplace_back(static_cast<double>(i), *first[i].lpms_d);
      }
      scatter.series = {std::move(r), std::move(d)};
      sink.svg("exp1_query_precision.svg", scatter);
    }

    json& m = sink.manifest();
    m["options"] = {{"records", options.records},
                    {"min_record_len", options.min_record_len},
                    {"max_record_len", options.max_record_len},
                    {"gram_count", options.gram_count},
                    {"sds", options.sds},
                    {"seeds", options.seeds},
                    {"queries", options.queries},
                    {"free_selectivity", options.free_selectivity},
                    {"min_len", options.min_len}};
    m["cells"] = std::move(cells);
    sink.finish();
  }
  return result;
}

// ---------------------------------------------------------------------------

Exp2Result run_exp2(const Exp2Options& options, const BenchOutput& out) {
  if (options.corpus_sizes.empty() || options.workload_sizes.empty()) {
    throw DataError("exp2 needs corpus sizes and workload sizes");
  }
  Sink sink(out, "exp2");
  Exp2Result result;
  const std::size_t repeats = std::max<std::size_t>(1, options.repeats);

  auto corpus_spec = [&](std::size_t records, std::uint64_t tag) {
    CorpusSpec cs;
    cs.record_count = records;
    cs.min_record_len = options.min_record_len;
    cs.max_record_len = options.max_record_len;
    cs.distribution = SupportDistribution::kNormal;
    cs.sd = 100;
    cs.seed = derive(options.seed, tag);
    return cs;
  };

  auto measure = [&](const Corpus& corpus, const Workload& w, std::uint64_t select_seed) {
    SelectionParams params;
    params.seed = select_seed;
    std::vector<double> mgt, mct, st, total;
    Exp2Row row;
    row.records = corpus.size();
    row.queries = w.queries.size();
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto start = Clock::now();
      const GramSelection sel = select_grams(options.mode, corpus, w.subqueries, params);
      const IndexArtifact index = build_index(corpus, sel);
      total.push_back(ms_since(start));
      mgt.push_back(sel.mgt_ms());
      mct.push_back(sel.mct_ms());
      st.push_back(sel.st_ms());
      row.grams = sel.grams.size();
    }
    row.mgt_ms = median(mgt);
    row.mct_ms = median(mct);
    row.st_ms = median(st);
    row.total_ms = median(total);
    return row;
  };

  // Nested prefixes of the largest corpus share one workload drawn from the
  // smallest prefix, so every size answers the same queries.
  std::vector<std::size_t> sizes = options.corpus_sizes;
  std::sort(sizes.begin(), sizes.end());
  const CorpusSpec big_spec = corpus_spec(sizes.back(), 1);
  const Corpus big = gen_corpus(big_spec);
  auto prefix = [&](std::size_t n) {
    return Corpus(std::vector<std::string>(big.records().begin(),
                                           big.records().begin() + static_cast<std::ptrdiff_t>(n)),
                  big_spec.alphabet);
  };
  const std::uint64_t size_workload_seed = derive(options.seed, 2);
  const Workload size_workload =
      make_workload(prefix(sizes.front()), options.size_queries, size_workload_seed);
  for (const std::size_t n : sizes) {
    result.by_size.push_back(measure(prefix(n), size_workload, derive(options.seed, 3)));
  }

  const CorpusSpec fixed_spec = corpus_spec(options.fixed_records, 4);
  const Corpus fixed = gen_corpus(fixed_spec);
  std::vector<std::size_t> wsizes = options.workload_sizes;
  std::sort(wsizes.begin(), wsizes.end());
  const std::uint64_t workload_seed = derive(options.seed, 5);
  const Workload all = make_workload(fixed, wsizes.back(), workload_seed);
  for (const std::size_t n : wsizes) {
    Workload w;
    w.queries.assign(all.queries.begin(),
                     all.queries.begin() + static_cast<std::ptrdiff_t>(std::min(n, all.queries.size())));
    w.subqueries = expand_workload(w.queries);
    result.by_workload.push_back(measure(fixed, w, derive(options.seed, 6)));
  }

  std::vector<double> xs, mgt;
  double mct_min = 0, mct_max = 0;
  result.total_nondecreasing = true;
  for (std::size_t i = 0; i < result.by_size.size(); ++i) {
    const auto& r = result.by_size[i];
    xs.push_back(static_cast<double>(r.records));
    mgt.push_back(r.mgt_ms);
    mct_min = i == 0 ? r.mct_ms : std::min(mct_min, r.mct_ms);
    mct_max = i == 0 ? r.mct_ms : std::max(mct_max, r.mct_ms);
    if (i > 0 && r.total_ms < result.by_size[i - 1].total_ms) result.total_nondecreasing = false;
  }
  result.mgt_r2 = xs.size() >= 2 ? linear_fit_r2(xs, mgt) : 1.0;
  result.mct_ratio = mct_min > 0 ? mct_max / mct_min : 0.0;
  result.mct_increasing = true;
  for (std::size_t i = 1; i < result.by_workload.size(); ++i) {
    if (result.by_workload[i].mct_ms <= result.by_workload[i - 1].mct_ms) {
      result.mct_increasing = false;
    }
  }

  if (sink.enabled()) {
    auto table = [](const std::vector<Exp2Row>& rows, bool timings) {
      std::ostringstream s;
      if (timings) {
        s << "records,queries,mgt_ms,mct_ms,st_ms,total_ms\n";
      } else {
        s << "records,queries,grams\n";
      }
      for (const auto& r : rows) {
        s << r.records << ',' << r.queries;
        if (timings) {
          s << ',' << fmt(r.mgt_ms) << ',' << fmt(r.mct_ms) << ',' << fmt(r.st_ms) << ','
            << fmt(r.total_ms);
        } else {
          s << ',' << r.grams;
        }
        s << '\n';
      }
      return s.str();
    };
    sink.csv("exp2_size.csv", table(result.by_size, false));
    sink.csv("exp2_size_timings.csv", table(result.by_size, true));
    sink.csv("exp2_workload.csv", table(result.by_workload, false));
    sink.csv("exp2_workload_timings.csv", table(result.by_workload, true));

    auto chart = [](const std::vector<Exp2Row>& rows, bool by_records, std::string title) {
      Chart c{std::move(title), by_records ? "records" : "queries", "milliseconds", {}, false};
      Series mgt{"MGT", {}}, mct{"MCT", {}}, st{"ST", {}};
      for (const auto& r : rows) {
        const double x = static_cast<double>(by_records ? r.records : r.queries);
        mgt.points.emplace_back(x, r.mgt_ms);
        mct.points.emplace_back(x, r.mct_ms);
        st.points.emplace_back(x, r.st_ms);
      }
      c.series = {std::move(mgt), std::move(mct), std::move(st)};
      return c;
    };
    sink.svg("exp2_size.svg", chart(result.by_size, true, "Selection time against corpus size"));
    sink.svg("exp2_workload.svg",
             chart(result.by_workload, false, "Selection time against workload size"));

    json& m = sink.manifest();
    m["options"] = {{"corpus_sizes", options.corpus_sizes},
                    {"size_queries", options.size_queries},
                    {"fixed_records", options.fixed_records},
                    {"workload_sizes", options.workload_sizes},
                    {"mode", to_string(options.mode)},
                    {"repeats", repeats},
                    {"seed", options.seed}};
    m["size_corpus"] = corpus_spec_json(big_spec);
    m["size_workload_seed"] = size_workload_seed;
    m["fixed_corpus"] = corpus_spec_json(fixed_spec);
    m["workload_seed"] = workload_seed;
    m["summary"] = {{"mgt_r2", result.mgt_r2},
                    {"mct_ratio", result.mct_ratio},
                    {"total_nondecreasing", result.total_nondecreasing},
                    {"mct_increasing", result.mct_increasing}};
    sink.finish();
  }
  return result;
}

// ---------------------------------------------------------------------------

const Exp3Row* Exp3Result::best_full_hit() const {
  for (const auto& r : rows) {
    if (r.mode == SelectionMode::kBest && r.hit_rate >= 1.0) return &r;
  }
  return nullptr;
}

const Exp3Row* Exp3Result::find(const std::string& index_type) const {
  for (const auto& r : rows) {
    if (r.index_type == index_type) return &r;
  }
  return nullptr;
}

Exp3Result run_exp3(const Exp3Options& options, const BenchOutput& out) {
  Sink sink(out, "exp3");
  CorpusSpec cs;
  cs.record_count = options.records;
  cs.min_record_len = options.min_record_len;
  cs.max_record_len = options.max_record_len;
  cs.distribution = SupportDistribution::kNormal;
  cs.sd = 100;
  cs.seed = derive(options.seed, 1);
  const Corpus corpus = gen_corpus(cs);
  const std::uint64_t workload_seed = derive(options.seed, 2);
  const Workload w = make_workload(corpus, options.queries, workload_seed);
  const auto truth = full_scan(corpus, w);

  SelectionParams params;
  params.seed = derive(options.seed, 3);
  params.benefit = options.benefit;

  Exp3Result result;
  auto add = [&](SelectionMode mode, std::size_t top_k, std::string label) {
    SelectionParams p = params;
    p.top_k = top_k;
    const Trial t = run_trial(corpus, w, truth, mode, p);
    Exp3Row row;
    row.index_type = std::move(label);
    row.mode = mode;
    row.top_k = top_k;
    row.queries = t.metrics.queries;
    row.correct_queries = t.metrics.correct_queries;
    row.hit_rate = t.metrics.hit_rate;
    row.precision_mean = t.metrics.precision_mean;
    row.precision_std = t.metrics.precision_std;
    row.posting_size = t.metrics.posting_size;
    row.grams = t.selection.grams.size();
    const auto texts = t.selection.gram_texts();
    row.prefix_free = !verify_prefix_free(texts).has_value();
    result.rows.push_back(row);
    return !t.selection.warnings.empty();
  };

  add(SelectionMode::kIpms, 0, "IPMS");
  add(SelectionMode::kLpmsR, 0, "LPMS-R");
  std::vector<std::size_t> ks = options.top_ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  bool exhausted = false;
  for (const std::size_t k : ks) {
    exhausted = add(SelectionMode::kBest, k, "B-" + std::to_string(k));
    if (exhausted) break;
  }
  // Keep growing k until BEST reaches every query or runs out of grams.
  std::size_t k = ks.empty() ? 0 : ks.back();
  const std::size_t step = std::max<std::size_t>(1, options.top_k_step);
  while (!exhausted && result.rows.back().hit_rate < 1.0) {
    k += step;
    exhausted = add(SelectionMode::kBest, k, "B-" + std::to_string(k));
  }

  if (sink.enabled()) {
    std::ostringstream csv;
    csv << "index_type,correct_queries,precision_mean,precision_std,posting_size,prefix_free,"
           "hit_rate,grams\n";
    for (const auto& r : result.rows) {
      csv << r.index_type << ',' << r.correct_queries << ',' << fmt(r.precision_mean) << ','
          << fmt(r.precision_std) << ',' << r.posting_size << ','
          << (r.prefix_free ? 'Y' : 'N') << ',' << fmt(r.hit_rate) << ',' << r.grams << '\n';
    }
    sink.csv("exp3.csv", csv.str());

    Chart chart{"Posting size of top-k BEST", "top k", "posting entries", {}, false};
    Series best{"BEST", {}};
    for (const auto& r : result.rows) {
      if (r.mode == SelectionMode::kBest) {
        best.points.emplace_back(static_cast<double>(r.top_k), static_cast<double>(r.posting_size));
      }
    }
    chart.series.push_back(std::move(best));
    if (!chart.series.front().points.empty()) {
      const double x0 = chart.series.front().points.front().first;
      const double x1 = chart.series.front().points.back().first;
      for (const char* name : {"IPMS", "LPMS-R"}) {
        const double y = static_cast<double>(result.find(name)->posting_size);
        chart.series.push_back({name, {{x0, y}, {x1, y}}});
      }
    }
    sink.svg("exp3_posting_size.svg", chart);

    json& m = sink.manifest();
    m["options"] = {{"records", options.records},
                    {"min_record_len", options.min_record_len},
                    {"max_record_len", options.max_record_len},
                    {"queries", options.queries},
                    {"top_ks", options.top_ks},
                    {"top_k_step", options.top_k_step},
                    {"benefit", to_string(options.benefit)},
                    {"seed", options.seed}};
    m["corpus"] = corpus_spec_json(cs);
    m["corpus_fingerprint"] = fingerprint_hex(corpus.fingerprint());
    m["workload_seed"] = workload_seed;
    m["params"] = params_json(params);
    sink.finish();
  }
  return result;
}

// ---------------------------------------------------------------------------

Exp4Result run_exp4(const Exp4Options& options, const BenchOutput& out) {
  Sink sink(out, "exp4");
  Exp4Result result;
  json datasets = json::array();
  for (std::size_t di = 0; di < options.alphabets.size(); ++di) {
    std::ostringstream name;
    name << "Rob" << std::setw(2) << std::setfill('0') << di + 1;
    CorpusSpec cs;
    cs.alphabet = expand_alphabet(options.alphabets[di]);
    cs.record_count = options.records;
    cs.min_record_len = options.min_record_len;
    cs.max_record_len = options.max_record_len;
    cs.seed = derive(options.seed, 1, di);
    const Corpus corpus = gen_corpus(cs);

    std::vector<Workload> tests;
    std::vector<std::vector<QueryAnswer>> truths;
    json test_seeds = json::array();
    for (std::size_t t = 0; t < options.test_workloads; ++t) {
      WorkloadSpec ws;
      ws.sample_fraction = options.test_fraction;
      ws.seed = derive(options.seed, 2, di * 1000 + t);
      test_seeds.push_back(ws.seed);
      Workload w;
      w.queries = gen_workload(corpus, ws).queries;
      w.subqueries = expand_workload(w.queries);
      truths.push_back(full_scan(corpus, w));
      tests.push_back(std::move(w));
    }

    json index_seeds = json::array();
    for (std::size_t fi = 0; fi < options.index_fractions.size(); ++fi) {
      const double fraction = options.index_fractions[fi];
      WorkloadSpec ws;
      ws.sample_fraction = fraction;
      ws.seed = derive(options.seed, 3, di * 1000 + fi);
      index_seeds.push_back(ws.seed);
      Workload train;
      train.queries = gen_workload(corpus, ws).queries;
      train.subqueries = expand_workload(train.queries);

      for (const SelectionMode mode : {SelectionMode::kLpmsR, SelectionMode::kLpmsD}) {
        SelectionParams params;
        params.seed = derive(options.seed, 4, di * 1000 + fi);
        const GramSelection sel = select_grams(mode, corpus, train.subqueries, params);
        const IndexArtifact index = build_index(corpus, sel);
        for (std::size_t t = 0; t < tests.size(); ++t) {
          const auto answers = evaluate_all(&index, corpus, tests[t].queries);
          const WorkloadMetrics m = compute_metrics(answers, &index, truths[t]);
          Exp4Row row;
          row.dataset = name.str();
          row.alphabet = options.alphabets[di];
          row.mode = mode;
          row.index_fraction = fraction;
          row.test = t + 1;
          row.queries = m.queries;
          row.hit_rate = m.hit_rate;
          row.recall_set = m.recall_set;
          row.precision_mean = m.precision_mean;
          row.posting_size = m.posting_size;
          result.rows.push_back(row);
        }
      }
    }
    datasets.push_back({{"name", name.str()},
                        {"corpus", corpus_spec_json(cs)},
                        {"corpus_fingerprint", fingerprint_hex(corpus.fingerprint())},
                        {"test_seeds", std::move(test_seeds)},
                        {"index_seeds", std::move(index_seeds)}});
  }

  if (sink.enabled()) {
    std::ostringstream csv, summary;
    csv << "dataset,alphabet,mode,index_fraction,test,queries,hit_rate,recall_set,"
           "precision_mean,posting_size\n";
    for (const auto& r : result.rows) {
      csv << r.dataset << ',' << r.alphabet << ',' << to_string(r.mode) << ','
          << fmt(r.index_fraction) << ',' << r.test << ',' << r.queries << ','
          << fmt(r.hit_rate) << ',' << fmt(r.recall_set) << ',' << fmt(r.precision_mean) << ','
          << r.posting_size << '\n';
    }
    // One line per (dataset, index): mean over the test workloads.
    summary << "dataset,index,hit_rate,recall_set,precision_mean\n";
    std::map<std::pair<std::string, std::string>, std::vector<const Exp4Row*>> groups;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& r : result.rows) {
      std::ostringstream label;
      label << mode_label(r.mode) << '-' << static_cast<int>(std::lround(r.index_fraction * 100));
      const auto key = std::make_pair(r.dataset, label.str());
      if (!groups.count(key)) order.push_back(key);
      groups[key].push_back(&r);
    }
    for (const auto& key : order) {
      std::vector<double> hit, rec, prec;
      for (const Exp4Row* r : groups[key]) {
        hit.push_back(r->hit_rate);
        rec.push_back(r->recall_set);
        if (r->precision_mean) prec.push_back(*r->precision_mean);
      }
      summary << key.first << ',' << key.second << ',' << fmt(mean_of(hit)) << ','
              << fmt(mean_of(rec)) << ',' << fmt(mean_of(prec)) << '\n';
    }
    sink.csv("exp4.csv", csv.str());
    sink.csv("exp4_summary.csv", summary.str());

    Chart chart{"LPMS-R hit rate on unseen queries", "indexed workload fraction", "hit rate",
                {}, false};
    for (std::size_t di = 0; di < options.alphabets.size(); ++di) {
      std::ostringstream name;
      name << "Rob" << std::setw(2) << std::setfill('0') << di + 1;
      Series s{name.str(), {}};
      for (const double f : options.index_fractions) {
        std::vector<double> hits;
        for (const auto& r : result.rows) {
          if (r.dataset == name.str() && r.mode == SelectionMode::kLpmsR &&
              r.index_fraction == f) {
            hits.push_back(r.hit_rate);
          }
        }
        if (auto m = mean_of(hits)) s.points.emplace_back(f, *m);
      }
      chart.series.push_back(std::move(s));
    }
    sink.svg("exp4_hit_rate.svg", chart);

    json& m = sink.manifest();
    m["options"] = {{"alphabets", options.alphabets},
                    {"records", options.records},
                    {"min_record_len", options.min_record_len},
                    {"max_record_len", options.max_record_len},
                    {"index_fractions", options.index_fractions},
                    {"test_workloads", options.test_workloads},
                    {"test_fraction", options.test_fraction},
                    {"seed", options.seed}};
    m["datasets"] = std::move(datasets);
    sink.finish();
  }
  return result;
}

// ---------------------------------------------------------------------------

Exp5Result run_exp5(const Exp5Options& options, const BenchOutput& out) {
  Sink sink(out, "exp5");
  const Corpus corpus = load_corpus(options.sequences);
  const auto entries = load_prosite(options.signatures);

  Workload w;
  std::vector<std::string> ids;
  std::size_t skipped = 0;
  for (const auto& e : entries) {
    try {
      w.queries.push_back(prosite_to_query(e.pattern));
      ids.push_back(e.id);
    } catch (const UnsupportedConstruct&) {
      ++skipped;
    }
  }
  w.subqueries = expand_workload(w.queries);
  const auto truth = full_scan(corpus, w);

  Exp5Result result;
  std::ostringstream per_query;
  per_query << "min_len,signature,used_index,candidates,matches\n";
  for (const std::size_t min_len : options.min_lens) {
    SelectionParams params;
    params.min_len = min_len;
    params.class_window = options.class_window;
    const Trial t = run_trial(corpus, w, truth, SelectionMode::kLpmsD, params);
    Exp5Row row;
    row.min_len = min_len;
    row.queries = t.metrics.queries;
    row.skipped = skipped;
    row.grams = t.selection.grams.size();
    row.hit_rate = t.metrics.hit_rate;
    row.precision_mean = t.metrics.precision_mean;
    row.precision_std = t.metrics.precision_std;
    row.correct_queries = t.metrics.correct_queries;
    row.posting_size = t.metrics.posting_size;
    result.rows.push_back(row);

    if (sink.enabled()) {
      const IndexArtifact index = build_index(corpus, t.selection);
      EvalOptions eval;
      eval.candidates.grams = params.gram_options();
      for (std::size_t q = 0; q < w.queries.size(); ++q) {
        const QueryAnswer a = evaluate(&index, corpus, w.queries[q], q, eval);
        per_query << min_len << ',' << ids[q] << ',' << (a.stats.used_index ? 1 : 0) << ','
                  << a.stats.candidate_count << ',' << a.matched.size() << '\n';
      }
    }
  }

  if (sink.enabled()) {
    std::ostringstream csv;
    csv << "min_len,queries,skipped,grams,hit_rate,precision_mean,precision_std,"
           "correct_queries,posting_size\n";
    for (const auto& r : result.rows) {
      csv << r.min_len << ',' << r.queries << ',' << r.skipped << ',' << r.grams << ','
          << fmt(r.hit_rate) << ',' << fmt(r.precision_mean) << ',' << fmt(r.precision_std)
          << ',' << r.correct_queries << ',' << r.posting_size << '\n';
    }
    sink.csv("exp5.csv", csv.str());
    sink.csv("exp5_queries.csv", per_query.str());

    json& m = sink.manifest();
    m["options"] = {{"sequences", options.sequences.string()},
                    {"signatures", options.signatures.string()},
                    {"min_lens", options.min_lens},
                    {"class_window", options.class_window}};
    m["corpus_fingerprint"] = fingerprint_hex(corpus.fingerprint());
    sink.finish();
  }
  return result;
}

}  // namespace mgram
