#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "mgram/corpus.hpp"
#include "mgram/query.hpp"

namespace mgram {

enum class SupportDistribution { kNone, kNormal };

struct CorpusSpec {
  std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::size_t record_count = 1000;
  std::size_t min_record_len = 100;
  std::size_t max_record_len = 100;
  SupportDistribution distribution = SupportDistribution::kNone;
  double mean = 0.0;             // of the Normal support draws
  double sd = 100.0;
  std::size_t gram_count = 1000;  // support draws in distribution mode
  std::uint64_t seed = 1;
};

struct WorkloadSpec {
  std::size_t key_count = 3;
  std::size_t min_key_len = 3;
  std::size_t max_key_len = 8;
  std::size_t max_gap = 30;  // largest actual distance between cut keys
  double sample_fraction = 0.1;
  std::size_t max_queries = 0;  // 0 means no cap
  std::uint64_t seed = 1;
};

struct GeneratedCorpus {
  Corpus corpus;
  std::vector<GramSupport> planted;  // distribution mode: gram and drawn support
};

/// Uniform mode fills records with uniform characters. Distribution mode
/// draws supports from |Normal(mean, sd)| (at least 1, ascending), names
/// grams by breadth-first alphabet expansion with a fair coin deciding
/// between planting and extending, and plants each gram into that many
/// distinct records at non-overlapping offsets over a uniform background.
GeneratedCorpus gen_corpus_detailed(const CorpusSpec& spec);
Corpus gen_corpus(const CorpusSpec& spec);

struct GeneratedWorkload {
  std::vector<std::string> lines;     // dialect text, one query each
  std::vector<RegexQuery> queries;
  std::vector<RecordId> sources;      // seed record per query
  std::size_t skipped = 0;            // sampled records too short to cut
};

/// Samples records with probability sample_fraction and cuts key_count
/// non-overlapping keys left to right from each. Gaps are written as
/// .{0,d} with d the actual distance rounded up to the next value ending
/// in 9, so the seed record always matches its query.
GeneratedWorkload gen_workload(const Corpus& corpus, const WorkloadSpec& spec);

/// key=value configuration, '#' comments. Unknown keys are an error.
CorpusSpec parse_corpus_spec(std::istream& in);
WorkloadSpec parse_workload_spec(std::istream& in);
CorpusSpec load_corpus_spec(const std::filesystem::path& path);
WorkloadSpec load_workload_spec(const std::filesystem::path& path);

/// "A-Z" style ranges expand; anything else is taken literally.
std::string expand_alphabet(const std::string& text);

/// Uniform integer in [0, n) by rejection, identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

/// Standard normal deviate by Box-Muller over the portable uniform.
double standard_normal(std::mt19937_64& rng);

}  // namespace mgram
