#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mgram/corpus.hpp"
#include "mgram/lpms.hpp"
#include "mgram/query.hpp"

namespace mgram {

struct IndexMeta {
  std::uint64_t corpus_fingerprint = 0;
  std::string mode;          // selection mode that produced the grams
  std::size_t min_len = 0;
  std::uint64_t seed = 0;
  std::size_t records = 0;   // corpus record count
  std::size_t total_chars = 0;
  std::size_t total_postings = 0;
  bool prefix_free = false;
  /// total_postings <= records. Prefix-freeness only guarantees
  /// total_postings <= total_chars (one gram start per position), so this
  /// is recorded rather than enforced.
  bool record_bound = false;
};

class IndexArtifact {
 public:
  IndexArtifact() = default;
  IndexArtifact(IndexMeta meta, std::vector<std::string> grams,
                std::vector<std::vector<RecordId>> postings);

  const IndexMeta& meta() const noexcept { return meta_; }
  /// Ascending.
  const std::vector<std::string>& grams() const noexcept { return grams_; }
  std::size_t size() const noexcept { return grams_.size(); }
  std::size_t max_gram_length() const noexcept { return max_len_; }

  /// Posting list of `gram`, or nullptr when it is not indexed.
  const std::vector<RecordId>* postings(std::string_view gram) const;
  const std::vector<RecordId>& postings_at(std::size_t i) const { return postings_.at(i); }

  friend bool operator==(const IndexArtifact& a, const IndexArtifact& b);

 private:
  IndexMeta meta_;
  std::vector<std::string> grams_;
  std::vector<std::vector<RecordId>> postings_;
  std::size_t max_len_ = 0;
};

/// Posting lists for the selected grams from one pass over the corpus.
/// For prefix-free modes this raises InternalError when the selection is not
/// prefix-free or the posting total exceeds the corpus character count.
IndexArtifact build_index(const Corpus& corpus, const GramSelection& sel);

/// Throws DataError when the index was built over a different corpus.
void check_fingerprint(const IndexArtifact& index, const Corpus& corpus);

/// Recomputes every posting list from the corpus and compares.
bool postings_match_corpus(const IndexArtifact& index, const Corpus& corpus);

struct IndexHit {
  std::vector<RecordId> records;   // ascending
  std::vector<std::string> grams;  // indexed grams that shaped the set
};

struct FullScan {
  std::string reason;
};

struct CandidateResult {
  std::variant<IndexHit, FullScan> kind;

  bool is_hit() const noexcept { return std::holds_alternative<IndexHit>(kind); }
  const IndexHit& hit() const { return std::get<IndexHit>(kind); }
};

struct CandidateOptions {
  GramOptions grams;
  /// Use only the one constraint with the smallest candidate set.
  bool single_gram = false;
};

/// Candidate records for a sub-query. Each key is cut into windows; a window
/// constrains the result when every one of its instantiations contains an
/// indexed gram, and then contributes the union over instantiations of the
/// intersection of those grams' postings. The candidates are the
/// intersection over all constraining windows, or FullScan when none
/// constrains. Every record matching the sub-query is returned.
CandidateResult candidates(const IndexArtifact& index, const SubQuery& sq,
                           const CandidateOptions& options = {});

/// MGIDX v1 text format with a trailing CRC32 line.
void write_index(const IndexArtifact& index, std::ostream& out);
IndexArtifact read_index(std::istream& in);
void save_index(const IndexArtifact& index, const std::filesystem::path& path);
IndexArtifact load_index(const std::filesystem::path& path);

}  // namespace mgram
