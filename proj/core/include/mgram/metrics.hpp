#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mgram/index.hpp"
#include "mgram/matcher.hpp"

namespace mgram {

struct WorkloadMetrics {
  std::size_t queries = 0;
  double hit_rate = 0.0;  // share of queries answered through the index
  /// |matched| / |candidates| for queries that used the index; an empty
  /// candidate set counts as precision 1.
  std::vector<std::optional<double>> precision;
  std::optional<double> precision_mean;
  std::optional<double> precision_std;  // population standard deviation
  /// Share of queries whose matches all lie in the index candidates: every
  /// index hit counts, a full scan counts only when nothing matches.
  double recall_set = 0.0;
  std::size_t correct_queries = 0;  // answers equal to the full-scan truth
  std::size_t posting_size = 0;
  double probe_ms = 0.0;
  double verify_ms = 0.0;
};

/// Throws DataError when `answers` and `truth` describe different workloads.
WorkloadMetrics compute_metrics(std::span<const QueryAnswer> answers,
                                const IndexArtifact* index,
                                std::span<const QueryAnswer> truth);

}  // namespace mgram
