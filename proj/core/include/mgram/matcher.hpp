#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "mgram/corpus.hpp"
#include "mgram/index.hpp"
#include "mgram/query.hpp"

namespace mgram {

/// Unanchored match: keys appear in order, and the distance between the end
/// of key i and the start of key i + 1 lies within gap i.
bool matches(const SubQuery& sq, std::string_view text);

struct QueryStats {
  bool used_index = false;   // every sub-query got an index hit
  bool partial = false;      // some, but not all, sub-queries got one
  std::size_t subqueries = 0;
  std::size_t candidate_count = 0;  // records verified (union over sub-queries)
  std::size_t verified_count = 0;   // records that matched
  double probe_ms = 0.0;
  double verify_ms = 0.0;
};

struct QueryAnswer {
  std::size_t query_id = 0;
  std::vector<RecordId> matched;  // ascending
  QueryStats stats;
};

struct EvalOptions {
  CandidateOptions candidates;
  std::size_t expansion_cap = kDefaultExpansionCap;
};

/// Expands the query, fetches candidates per sub-query from the index (or
/// scans every record when `index` is null or has nothing to offer), and
/// verifies each candidate. The answer is the union over sub-queries.
QueryAnswer evaluate(const IndexArtifact* index, const Corpus& corpus, const RegexQuery& q,
                     std::size_t query_id = 0, const EvalOptions& options = {});

std::vector<QueryAnswer> evaluate_all(const IndexArtifact* index, const Corpus& corpus,
                                      std::span<const RegexQuery> queries,
                                      const EvalOptions& options = {});

/// CSV with header "query_id,record_id", one row per match.
void write_answers_csv(std::span<const QueryAnswer> answers, std::ostream& out);

}  // namespace mgram
