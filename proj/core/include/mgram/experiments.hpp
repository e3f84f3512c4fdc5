#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mgram/lpms.hpp"

namespace mgram {

/// Where a bench run writes its CSV files, plots and manifest. An empty
/// directory means "compute only".
struct BenchOutput {
  std::filesystem::path dir;
  bool svg = true;
};

// ---------------------------------------------------------------------------
// Experiment 1: hit rate and precision against the support spread.

struct Exp1Options {
  std::size_t records = 10000;
  std::size_t min_record_len = 50;
  std::size_t max_record_len = 150;
  std::size_t gram_count = 1000;
  std::vector<double> sds{100, 200, 300, 400, 500};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t queries = 100;
  double free_selectivity = 0.1;
  std::size_t min_len = 2;
};

struct Exp1Cell {
  std::uint64_t seed = 0;
  double sd = 0.0;
  SelectionMode mode = SelectionMode::kLpmsD;
  std::size_t queries = 0;
  std::size_t grams = 0;
  double hit_rate = 0.0;
  std::optional<double> precision_mean;
  std::optional<double> precision_std;
  double recall_set = 0.0;
  std::size_t correct_queries = 0;
  std::size_t posting_size = 0;
  double build_ms = 0.0;
  double query_ms = 0.0;
};

struct Exp1QueryPrecision {
  std::uint64_t seed = 0;
  double sd = 0.0;
  std::size_t query = 0;
  std::optional<double> lpms_r;
  std::optional<double> lpms_d;
};

struct Exp1Result {
  std::vector<Exp1Cell> cells;
  std::vector<Exp1QueryPrecision> per_query;

  const Exp1Cell* find(std::uint64_t seed, double sd, SelectionMode mode) const;
};

Exp1Result run_exp1(const Exp1Options& options, const BenchOutput& out = {});

// ---------------------------------------------------------------------------
// Experiment 2: selection time against corpus size and workload size.

struct Exp2Options {
  std::vector<std::size_t> corpus_sizes{5000, 10000, 20000, 30000, 40000};
  std::size_t size_queries = 200;
  std::size_t fixed_records = 10000;
  std::vector<std::size_t> workload_sizes{100, 200, 400, 800};
  std::size_t min_record_len = 80;
  std::size_t max_record_len = 120;
  SelectionMode mode = SelectionMode::kLpmsR;
  std::size_t repeats = 3;
  std::uint64_t seed = 1;
};

struct Exp2Row {
  std::size_t records = 0;
  std::size_t queries = 0;
  std::size_t grams = 0;
  double mgt_ms = 0.0;
  double mct_ms = 0.0;
  double st_ms = 0.0;
  double total_ms = 0.0;
};

struct Exp2Result {
  std::vector<Exp2Row> by_size;      // fixed workload
  std::vector<Exp2Row> by_workload;  // fixed corpus
  double mgt_r2 = 0.0;               // linear fit of MGT against records
  double mct_ratio = 0.0;            // max / min MCT across corpus sizes
  bool total_nondecreasing = false;  // across corpus sizes
  bool mct_increasing = false;       // across workload sizes
};

Exp2Result run_exp2(const Exp2Options& options, const BenchOutput& out = {});

/// Coefficient of determination of the least-squares line through the points.
double linear_fit_r2(const std::vector<double>& xs, const std::vector<double>& ys);

// ---------------------------------------------------------------------------
// Experiment 3: index size of IPMS, LPMS-R and top-k BEST.

struct Exp3Options {
  std::size_t records = 2000;
  std::size_t min_record_len = 80;
  std::size_t max_record_len = 120;
  std::size_t queries = 100;
  std::vector<std::size_t> top_ks{100, 110, 120, 130, 140, 150, 200, 250};
  std::size_t top_k_step = 50;  // added past the list until the hit rate is 1
  BenefitModel benefit = BenefitModel::kPruned;
  std::uint64_t seed = 7;
};

struct Exp3Row {
  std::string index_type;  // "IPMS", "LPMS-R", "B-100", ...
  SelectionMode mode = SelectionMode::kIpms;
  std::size_t top_k = 0;
  std::size_t queries = 0;
  std::size_t correct_queries = 0;
  double hit_rate = 0.0;
  std::optional<double> precision_mean;
  std::optional<double> precision_std;
  std::size_t posting_size = 0;
  std::size_t grams = 0;
  bool prefix_free = false;
};

struct Exp3Result {
  std::vector<Exp3Row> rows;
  /// First BEST row whose hit rate is 1, if any.
  const Exp3Row* best_full_hit() const;
  const Exp3Row* find(const std::string& index_type) const;
};

Exp3Result run_exp3(const Exp3Options& options, const BenchOutput& out = {});

// ---------------------------------------------------------------------------
// Experiment 4: generalization from a sampled workload to unseen queries.

struct Exp4Options {
  std::vector<std::string> alphabets{"A-D", "A-H", "A-L", "A-P"};
  std::size_t records = 1000;
  std::size_t min_record_len = 100;
  std::size_t max_record_len = 500;
  std::vector<double> index_fractions{0.1, 0.3, 0.5};
  std::size_t test_workloads = 5;
  double test_fraction = 0.02;
  std::uint64_t seed = 1;
};

struct Exp4Row {
  std::string dataset;   // Rob01 ...
  std::string alphabet;
  SelectionMode mode = SelectionMode::kLpmsR;
  double index_fraction = 0.0;
  std::size_t test = 0;  // 1-based test workload
  std::size_t queries = 0;
  double hit_rate = 0.0;
  double recall_set = 0.0;
  std::optional<double> precision_mean;
  std::size_t posting_size = 0;
};

struct Exp4Result {
  std::vector<Exp4Row> rows;
};

Exp4Result run_exp4(const Exp4Options& options, const BenchOutput& out = {});

// ---------------------------------------------------------------------------
// Experiment 5: protein signatures with two minimum gram lengths.

struct Exp5Options {
  std::filesystem::path sequences;
  std::filesystem::path signatures;
  std::vector<std::size_t> min_lens{2, 3};
  std::size_t class_window = 3;
};

struct Exp5Row {
  std::size_t min_len = 0;
  std::size_t queries = 0;
  std::size_t skipped = 0;  // signatures with constructs the dialect lacks
  std::size_t grams = 0;
  double hit_rate = 0.0;
  std::optional<double> precision_mean;
  std::optional<double> precision_std;
  std::size_t correct_queries = 0;
  std::size_t posting_size = 0;
};

struct Exp5Result {
  std::vector<Exp5Row> rows;
};

Exp5Result run_exp5(const Exp5Options& options, const BenchOutput& out = {});

}  // namespace mgram
