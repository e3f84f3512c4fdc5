#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgram/corpus.hpp"
#include "mgram/query.hpp"
#include "mgram/solvers.hpp"

namespace mgram {

enum class SelectionMode { kIpms, kLpmsD, kLpmsR, kFree, kBest };

/// "ipms", "lpms-d", "lpms-r", "free", "best".
std::string to_string(SelectionMode mode);
SelectionMode parse_mode(std::string_view text);

/// IPMS, LPMS and FREE promise a prefix-free gram set; BEST does not.
bool is_prefix_free_mode(SelectionMode mode);

/// How BEST scores a gram over (sub-query, record) pairs whose sub-query
/// contains the gram: kPruned counts the records lacking it, kMatched the
/// records containing it.
enum class BenefitModel { kPruned, kMatched };

std::string to_string(BenefitModel model);
BenefitModel parse_benefit(std::string_view text);

struct SelectionParams {
  std::size_t min_len = kDefaultMinGramLength;
  std::size_t class_window = 3;
  std::size_t instantiation_cap = 4096;
  std::uint64_t seed = 0;
  double selectivity = 0.1;  // FREE: useful when support < selectivity * |records|
  std::size_t top_k = 100;   // BEST
  BenefitModel benefit = BenefitModel::kPruned;
  std::size_t node_limit = 1'000'000;  // IPMS

  GramOptions gram_options() const {
    return {min_len, class_window, instantiation_cap};
  }
};

struct IterationStats {
  std::size_t gram_length = 0;  // length of the children considered
  std::size_t candidates = 0;   // children entering the model
  std::size_t rows = 0;         // unsatisfied rows with at least one candidate
  std::size_t selected = 0;
  std::size_t satisfied = 0;    // rows satisfied by this iteration's picks
  bool forced = false;          // randomized rounding picked nothing
  double mgt_ms = 0.0;          // children generation and support counting
  double mct_ms = 0.0;          // model construction
  double st_ms = 0.0;           // LP or IP solve plus rounding
};

struct GramSelection {
  SelectionMode mode = SelectionMode::kLpmsD;
  SelectionParams params;
  std::uint64_t corpus_fingerprint = 0;
  std::vector<GramSupport> grams;  // ascending by gram
  std::vector<IterationStats> stats;
  std::size_t rows_total = 0;      // constraint rows of the workload
  std::size_t rows_satisfied = 0;  // rows covered by the selection
  std::vector<std::string> warnings;

  std::vector<std::string> gram_texts() const;
  std::size_t total_support() const;
  double mgt_ms() const;
  double mct_ms() const;
  double st_ms() const;
};

struct PrefixViolation {
  std::string prefix;
  std::string longer;
};

/// Returns a pair (u, v) where u is a proper prefix of v, or nothing when the
/// set is prefix-free. Duplicates are ignored.
std::optional<PrefixViolation> verify_prefix_free(std::span<const std::string> grams);

/// Iterative LP-based selection, deterministic (kLpmsD) or randomized
/// (kLpmsR) rounding. Starting from the empty prefix, each round extends the
/// surviving grams by one alphabet character, keeps children that occur in
/// some still-unsatisfied row, solves the LP over them, and moves the rounded
/// picks into the result. Descendants of picked grams are never considered.
GramSelection select_lpms(const Corpus& corpus, std::span<const SubQuery> subqueries,
                          SelectionMode mode, const SelectionParams& params = {});

/// Exact integer program over the full workload model.
GramSelection select_ipms(const Corpus& corpus, std::span<const SubQuery> subqueries,
                          const SelectionParams& params = {});

/// Text format: "MGSEL v1" header, mode, parameters, corpus fingerprint,
/// then one "gram<TAB>support" line per gram in ascending gram order.
void write_selection(const GramSelection& sel, std::ostream& out);
GramSelection read_selection(std::istream& in);
void save_selection(const GramSelection& sel, const std::filesystem::path& path);
GramSelection load_selection(const std::filesystem::path& path);

}  // namespace mgram
