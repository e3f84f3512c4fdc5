#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mgram {

using RecordId = std::uint32_t;

/// Default window of candidate gram lengths for small corpora. Selection
/// runs take grams from query keys instead.
inline constexpr std::size_t kDefaultMinGramLength = 2;
inline constexpr std::size_t kDefaultMaxGramLength = 4;

/// An immutable, newline-free string database with dense record ids.
class Corpus {
 public:
  Corpus() = default;

  /// Builds a corpus from in-memory records. When `alphabet` is given every
  /// character must belong to it; otherwise the alphabet is inferred as the
  /// set of distinct characters. Throws DataError naming the record id and
  /// offset of the first offending character.
  explicit Corpus(std::vector<std::string> records,
                  std::optional<std::string> alphabet = std::nullopt);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::string& record(RecordId id) const { return records_.at(id); }
  std::span<const std::string> records() const noexcept { return records_; }

  /// Sorted distinct characters.
  const std::string& alphabet() const noexcept { return alphabet_; }
  bool in_alphabet(char c) const noexcept {
    return member_[static_cast<unsigned char>(c)];
  }

  std::size_t total_chars() const noexcept { return total_chars_; }

  /// 64-bit FNV-1a over the LF-terminated record bytes.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  std::vector<std::string> records_;
  std::string alphabet_;
  bool member_[256] = {};
  std::size_t total_chars_ = 0;
  std::uint64_t fingerprint_ = 0;
};

std::string fingerprint_hex(std::uint64_t fingerprint);
std::uint64_t parse_fingerprint_hex(std::string_view hex);

/// One record per LF-terminated line. A trailing CR is not stripped.
Corpus load_corpus(const std::filesystem::path& path,
                   std::optional<std::string> alphabet = std::nullopt);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Number of records containing `gram` at least once.
std::size_t support(const Corpus& corpus, std::string_view gram);

/// Ids of records containing `gram`, ascending.
std::vector<RecordId> records_containing(const Corpus& corpus,
                                         std::string_view gram);

/// Supports of many grams with one corpus pass per distinct gram length.
/// Grams may repeat; the result has one entry per distinct gram.
std::unordered_map<std::string, std::size_t> count_supports(
    const Corpus& corpus, std::span<const std::string> grams);

struct GramSupport {
  std::string gram;
  std::size_t support = 0;

  friend bool operator==(const GramSupport&, const GramSupport&) = default;
};

/// Every distinct substring with length in [min_len, max_len] paired with its
/// support, in lexicographic order.
std::vector<GramSupport> enumerate_grams(const Corpus& corpus,
                                         std::size_t min_len,
                                         std::size_t max_len);

}  // namespace mgram
