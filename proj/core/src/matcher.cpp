#include "mgram/matcher.hpp"

#include <chrono>
#include <ostream>

namespace mgram {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool key_at(const Key& key, std::string_view text, std::size_t pos) {
  for (std::size_t i = 0; i < key.length(); ++i) {
    if (!key.at(i).test(static_cast<unsigned char>(text[pos + i]))) return false;
  }
  return true;
}

}  // namespace

bool matches(const SubQuery& sq, std::string_view text) {
  if (sq.keys.empty()) return true;
  const std::size_t n = text.size();
  // ok[p] marks starts of key i that complete a valid chain of keys 0..i.
  std::vector<char> ok(n + 1, 0);
  std::vector<std::size_t> prefix(n + 2, 0);
  bool any = false;
  const Key& first = sq.keys.front();
  if (first.length() > n) return false;
  for (std::size_t p = 0; p + first.length() <= n; ++p) {
    ok[p] = key_at(first, text, p);
    any = any || ok[p];
  }
  for (std::size_t k = 1; k < sq.keys.size() && any; ++k) {
    const std::size_t prev_len = sq.keys[k - 1].length();
    const Key& key = sq.keys[k];
    const Gap gap = sq.gaps[k - 1];
    for (std::size_t p = 0; p <= n; ++p) prefix[p + 1] = prefix[p] + static_cast<std::size_t>(ok[p]);
    std::vector<char> next(n + 1, 0);
    any = false;
    for (std::size_t p = 0; p + key.length() <= n; ++p) {
      // Previous key must start in [p - prev_len - hi, p - prev_len - lo].
      if (p < prev_len + gap.lo) continue;
      const std::size_t hi_start = p - prev_len - gap.lo;
      const std::size_t lo_start = p >= prev_len + gap.hi ? p - prev_len - gap.hi : 0;
      if (prefix[hi_start + 1] == prefix[lo_start]) continue;
      if (key_at(key, text, p)) {
        next[p] = 1;
        any = true;
      }
    }
    ok.swap(next);
  }
  return any;
}

QueryAnswer evaluate(const IndexArtifact* index, const Corpus& corpus, const RegexQuery& q,
                     std::size_t query_id, const EvalOptions& options) {
  if (index != nullptr) check_fingerprint(*index, corpus);
  QueryAnswer answer;
  answer.query_id = query_id;
  const auto subqueries = expand_or(q, query_id, options.expansion_cap);
  answer.stats.subqueries = subqueries.size();

  std::vector<char> checked(corpus.size(), 0), matched(corpus.size(), 0);
  std::size_t hits = 0;
  for (const auto& sq : subqueries) {
    auto start = Clock::now();
    std::vector<RecordId> pool;
    bool hit = false;
    if (index != nullptr) {
      CandidateResult c = candidates(*index, sq, options.candidates);
      if (c.is_hit()) {
        hit = true;
        pool = std::move(std::get<IndexHit>(c.kind).records);
      }
    }
    if (!hit) {
      pool.resize(corpus.size());
      for (std::size_t r = 0; r < corpus.size(); ++r) pool[r] = static_cast<RecordId>(r);
    }
    hits += hit;
    answer.stats.probe_ms += ms_since(start);

    start = Clock::now();
    for (RecordId r : pool) {
      checked[r] = 1;
      if (!matched[r] && matches(sq, corpus.record(r))) matched[r] = 1;
    }
    answer.stats.verify_ms += ms_since(start);
  }
  for (std::size_t r = 0; r < corpus.size(); ++r) {
    answer.stats.candidate_count += checked[r];
    if (matched[r]) answer.matched.push_back(static_cast<RecordId>(r));
  }
  answer.stats.verified_count = answer.matched.size();
  answer.stats.used_index = !subqueries.empty() && hits == subqueries.size();
  answer.stats.partial = hits > 0 && hits < subqueries.size();
  return answer;
}

std::vector<QueryAnswer> evaluate_all(const IndexArtifact* index, const Corpus& corpus,
                                      std::span<const RegexQuery> queries,
                                      const EvalOptions& options) {
  std::vector<QueryAnswer> out;
  out.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out.push_back(evaluate(index, corpus, queries[i], i, options));
  }
  return out;
}

void write_answers_csv(std::span<const QueryAnswer> answers, std::ostream& out) {
  out << "query_id,record_id\n";
  for (const auto& a : answers) {
    for (RecordId r : a.matched) out << a.query_id << ',' << r << '\n';
  }
}

}  // namespace mgram
