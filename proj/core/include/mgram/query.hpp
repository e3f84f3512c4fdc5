#pragma once

#include <bitset>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mgram/error.hpp"

namespace mgram {

class ExpansionLimitError : public DataError {
 public:
  ExpansionLimitError(std::size_t count, std::size_t cap)
      : DataError("alternation expands to " + std::to_string(count) +
                  " sub-queries, over the cap of " + std::to_string(cap)),
        count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

class UnsupportedConstruct : public DataError {
 public:
  explicit UnsupportedConstruct(const std::string& construct)
      : DataError("unsupported PROSITE construct: " + construct),
        construct_(construct) {}
  const std::string& construct() const noexcept { return construct_; }

 private:
  std::string construct_;
};

using CharSet = std::bitset<256>;

/// A contiguous run of character positions. A position holding a single
/// character is literal; a key whose positions are all literal is a literal
/// key and behaves like a plain string.
class Key {
 public:
  Key() = default;
  explicit Key(std::string_view literal);
  explicit Key(std::vector<CharSet> positions);

  std::size_t length() const noexcept { return positions_.size(); }
  const std::vector<CharSet>& positions() const noexcept { return positions_; }
  const CharSet& at(std::size_t i) const { return positions_.at(i); }

  bool is_literal() const noexcept;
  bool is_literal(std::size_t from, std::size_t to) const noexcept;
  /// The literal text; throws DataError when the key has class positions.
  std::string literal() const;
  /// Dialect rendering: literal characters, classes as `[...]`.
  std::string to_string() const;

  /// Number of concrete strings matched by positions [from, to), saturating
  /// at `cap + 1`.
  std::size_t instantiation_count(std::size_t from, std::size_t to,
                                  std::size_t cap) const noexcept;
  /// All concrete strings for positions [from, to) in lexicographic order.
  /// Returns nullopt when there are more than `cap`.
  std::optional<std::vector<std::string>> instantiations(std::size_t from,
                                                         std::size_t to,
                                                         std::size_t cap) const;

  friend bool operator==(const Key&, const Key&) = default;

 private:
  std::vector<CharSet> positions_;
};

/// Arbitrary characters, at least `lo` and at most `hi` of them.
struct Gap {
  std::size_t lo = 0;
  std::size_t hi = 0;
  friend bool operator==(const Gap&, const Gap&) = default;
};

struct Element;

struct Alternation {
  std::vector<std::vector<Element>> branches;
};

struct Element {
  std::variant<Key, Gap, Alternation> node;
};

struct RegexQuery {
  std::string source_text;
  std::vector<Element> elements;
};

/// An alternation-free query: keys separated by gaps.
struct SubQuery {
  std::vector<Key> keys;
  std::vector<Gap> gaps;  // gaps[i] sits between keys[i] and keys[i + 1]
  std::size_t origin = 0;  // id of the parent query
  std::optional<std::size_t> duplicate_of;  // earlier identical sub-query

  bool is_literal() const noexcept;
  std::string to_string() const;
};

/// Parses the gap-constrained dialect:
///
///   query  := item+
///   item   := group ('|' group)* | gap
///   group  := '(' (gap | item+ | keytext) ')'
///   gap    := '.' ( '{' n (',' n)? '}' )?
///   keytext:= (char | '\' char | '[' chars ']')+
///
/// Alternation binds tighter than concatenation, so `(a)|(b).{1,2}(c)` reads
/// as `{a,b} gap {c}`. Throws ParseError with the byte offset on failure.
RegexQuery parse_query(std::string_view text);

inline constexpr std::size_t kDefaultExpansionCap = 1024;

/// Cartesian expansion of alternations in branch order. Adjacent keys are
/// merged and adjacent gaps summed. Identical sub-queries are kept and marked
/// through `duplicate_of`.
std::vector<SubQuery> expand_or(const RegexQuery& query, std::size_t query_id = 0,
                                std::size_t cap = kDefaultExpansionCap);

/// Number of sub-queries expand_or would produce (saturating).
std::size_t expansion_count(const RegexQuery& query);

struct GramOptions {
  std::size_t min_len = 2;
  /// Longest window of consecutive positions that may contain character
  /// classes when enumerating concrete grams of a class key.
  std::size_t class_window = 3;
  /// Per-key limit on enumerated class instantiations.
  std::size_t instantiation_cap = 4096;
};

struct KeyGramSets {
  std::vector<std::string> m_q;      // whole keys
  std::vector<std::string> m_bar_q;  // keys and their substrings, length >= min_len
  std::vector<std::size_t> truncated_keys;  // class keys that hit the cap
};

/// M_q and the substring closure M̄_q of a sub-query. Literal keys contribute
/// all substrings of length >= min_len; class keys contribute their literal
/// sub-runs plus every instantiation of class windows up to
/// `class_window` long. Order is deterministic: key by key, then by length,
/// then by start offset, first occurrence wins.
KeyGramSets key_grams(const SubQuery& sq, const GramOptions& options = {});

/// One line per query, blank lines and lines starting with '#' ignored.
std::vector<RegexQuery> load_queries(const std::filesystem::path& path);
void save_queries(const std::vector<std::string>& lines,
                  const std::filesystem::path& path);

/// Expands every query, assigning `origin` by position in `queries`.
std::vector<SubQuery> expand_workload(const std::vector<RegexQuery>& queries,
                                      std::size_t cap = kDefaultExpansionCap);

/// Translates a PROSITE signature. Runs of non-wildcard positions become keys,
/// runs of `x` become gaps. Throws UnsupportedConstruct for exclusions `{}`,
/// anchors `<` `>`, repeated classes and ranged residue repetition.
RegexQuery prosite_to_query(std::string_view pattern);

struct PrositeEntry {
  std::string id;
  std::string pattern;
};

/// One signature per line, either `PATTERN` or `ID;PATTERN`.
std::vector<PrositeEntry> load_prosite(const std::filesystem::path& path);

}  // namespace mgram
