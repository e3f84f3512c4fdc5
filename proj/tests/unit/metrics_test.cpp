#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mgram/metrics.hpp"

using namespace mgram;

namespace {

QueryAnswer answer(std::size_t id, std::vector<RecordId> matched, bool used,
                   std::size_t candidates) {
  QueryAnswer a;
  a.query_id = id;
  a.matched = std::move(matched);
  a.stats.used_index = used;
  a.stats.candidate_count = candidates;
  a.stats.verified_count = a.matched.size();
  return a;
}

}  // namespace

TEST(Metrics, HandComputedWorkload) {
  const std::vector<QueryAnswer> truth{answer(0, {1, 2}, false, 10), answer(1, {3}, false, 10),
                                       answer(2, {}, false, 10), answer(3, {4}, false, 10)};
  const std::vector<QueryAnswer> got{answer(0, {1, 2}, true, 4), answer(1, {3}, true, 1),
                                     answer(2, {}, true, 0), answer(3, {4}, false, 10)};
  const WorkloadMetrics m = compute_metrics(got, nullptr, truth);
  EXPECT_EQ(m.queries, 4u);
  EXPECT_DOUBLE_EQ(m.hit_rate, 0.75);
  ASSERT_EQ(m.precision.size(), 4u);
  EXPECT_DOUBLE_EQ(*m.precision[0], 0.5);
  EXPECT_DOUBLE_EQ(*m.precision[1], 1.0);
  EXPECT_DOUBLE_EQ(*m.precision[2], 1.0);
  EXPECT_FALSE(m.precision[3].has_value());
  EXPECT_DOUBLE_EQ(*m.precision_mean, 2.5 / 3.0);
  const double mean = 2.5 / 3.0;
  const double var = ((0.5 - mean) * (0.5 - mean) + 2 * (1 - mean) * (1 - mean)) / 3.0;
  EXPECT_NEAR(*m.precision_std, std::sqrt(var), 1e-12);
  EXPECT_EQ(m.correct_queries, 4u);
  EXPECT_DOUBLE_EQ(m.recall_set, 0.75);
}

TEST(Metrics, EmptyWorkload) {
  const WorkloadMetrics m = compute_metrics({}, nullptr, {});
  EXPECT_EQ(m.queries, 0u);
  EXPECT_DOUBLE_EQ(m.hit_rate, 0.0);
  EXPECT_FALSE(m.precision_mean.has_value());
  EXPECT_FALSE(m.precision_std.has_value());
}

TEST(Metrics, MismatchedWorkloads) {
  const std::vector<QueryAnswer> a{answer(0, {}, false, 1)};
  const std::vector<QueryAnswer> b{answer(1, {}, false, 1)};
  EXPECT_THROW(compute_metrics(a, nullptr, b), DataError);
  EXPECT_THROW(compute_metrics(a, nullptr, {}), DataError);
}

TEST(Metrics, WrongAnswerIsNotCorrect) {
  const std::vector<QueryAnswer> truth{answer(0, {1}, false, 5)};
  const std::vector<QueryAnswer> got{answer(0, {}, true, 2)};
  EXPECT_EQ(compute_metrics(got, nullptr, truth).correct_queries, 0u);
}
