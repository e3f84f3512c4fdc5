#include "mgram/metrics.hpp"

#include <cmath>

#include "mgram/error.hpp"

namespace mgram {

WorkloadMetrics compute_metrics(std::span<const QueryAnswer> answers,
                                const IndexArtifact* index,
                                std::span<const QueryAnswer> truth) {
  if (answers.size() != truth.size()) {
    throw DataError("metrics: " + std::to_string(answers.size()) + " answers against " +
                    std::to_string(truth.size()) + " truth entries");
  }
  WorkloadMetrics m;
  m.queries = answers.size();
  m.posting_size = index != nullptr ? index->meta().total_postings : 0;
  if (m.queries == 0) return m;

  std::size_t hits = 0;
  double sum = 0.0, sum_sq = 0.0, recall = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const QueryAnswer& a = answers[i];
    if (a.query_id != truth[i].query_id) throw DataError("metrics: query ids differ at position " + std::to_string(i));
    m.correct_queries += a.matched == truth[i].matched;
    m.probe_ms += a.stats.probe_ms;
    m.verify_ms += a.stats.verify_ms;
    if (a.stats.used_index) {
      ++hits;
      const double p = a.stats.candidate_count == 0
                           ? 1.0
                           : static_cast<double>(a.stats.verified_count) /
                                 static_cast<double>(a.stats.candidate_count);
      m.precision.emplace_back(p);
      sum += p;
      sum_sq += p * p;
      ++defined;
      recall += 1.0;  // candidates are a superset of the matches
    } else {
      m.precision.emplace_back(std::nullopt);
      recall += truth[i].matched.empty() ? 1.0 : 0.0;
    }
  }
  m.hit_rate = static_cast<double>(hits) / static_cast<double>(m.queries);
  m.recall_set = recall / static_cast<double>(m.queries);
  if (defined > 0) {
    const double mean = sum / static_cast<double>(defined);
    m.precision_mean = mean;
    m.precision_std = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(defined) - mean * mean));
  }
  return m;
}

}  // namespace mgram
