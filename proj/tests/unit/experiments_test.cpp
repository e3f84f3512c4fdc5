#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgram/experiments.hpp"

using namespace mgram;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

Exp1Options tiny_exp1() {
  Exp1Options o;
  o.records = 400;
  o.min_record_len = 40;
  o.max_record_len = 80;
  o.gram_count = 60;
  o.sds = {10, 20};
  o.seeds = {1};
  o.queries = 15;
  return o;
}

}  // namespace

TEST(Experiments, LinearFit) {
  EXPECT_NEAR(linear_fit_r2({1, 2, 3, 4}, {2, 4, 6, 8}), 1.0, 1e-12);
  EXPECT_NEAR(linear_fit_r2({1, 2, 3}, {1, 3, 2}), 0.25, 1e-12);
  EXPECT_THROW(linear_fit_r2({1}, {1}), DataError);
}

TEST(Experiments, Exp1CsvIsReproducible) {
  const auto a = fresh_dir("mgram_exp1_a");
  const auto b = fresh_dir("mgram_exp1_b");
  const Exp1Result ra = run_exp1(tiny_exp1(), {a, true});
  run_exp1(tiny_exp1(), {b, false});
  EXPECT_EQ(ra.cells.size(), 6u);
  EXPECT_EQ(slurp(a / "exp1.csv"), slurp(b / "exp1.csv"));
  EXPECT_EQ(slurp(a / "exp1_query_precision.csv"), slurp(b / "exp1_query_precision.csv"));
  EXPECT_TRUE(std::filesystem::exists(a / "exp1_hit_rate.svg"));
  EXPECT_FALSE(std::filesystem::exists(b / "exp1_hit_rate.svg"));
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["experiment"], "exp1");
  EXPECT_EQ(manifest["cells"].size(), 2u);
  for (const auto& c : ra.cells) {
    EXPECT_EQ(c.correct_queries, c.queries);
    if (c.mode == SelectionMode::kLpmsD) EXPECT_DOUBLE_EQ(c.hit_rate, 1.0);
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Experiments, Exp3TableSchema) {
  Exp3Options o;
  o.records = 1000;
  o.queries = 20;
  o.top_ks = {5, 10};
  const auto dir = fresh_dir("mgram_exp3");
  const Exp3Result r = run_exp3(o, {dir, false});
  const std::string csv = slurp(dir / "exp3.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "index_type,correct_queries,precision_mean,precision_std,posting_size,prefix_free,"
            "hit_rate,grams");
  ASSERT_NE(r.find("IPMS"), nullptr);
  ASSERT_NE(r.find("LPMS-R"), nullptr);
  EXPECT_TRUE(r.find("IPMS")->prefix_free);
  // BEST grows until every query is answered through the index or it runs
  // out of candidate grams.
  EXPECT_GE(r.rows.size(), 4u);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, Exp2SmallRun) {
  Exp2Options o;
  o.corpus_sizes = {1000, 1500};
  o.size_queries = 10;
  o.fixed_records = 1000;
  o.workload_sizes = {5, 10};
  o.repeats = 1;
  const Exp2Result r = run_exp2(o);
  ASSERT_EQ(r.by_size.size(), 2u);
  ASSERT_EQ(r.by_workload.size(), 2u);
  EXPECT_EQ(r.by_size[0].queries, r.by_size[1].queries);
  EXPECT_EQ(r.by_workload[1].queries, 10u);
}

TEST(Experiments, Exp4SmallRun) {
  Exp4Options o;
  o.alphabets = {"A-D"};
  o.records = 100;
  o.min_record_len = 50;
  o.max_record_len = 80;
  o.index_fractions = {0.2};
  o.test_workloads = 2;
  o.test_fraction = 0.1;
  const Exp4Result r = run_exp4(o);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].dataset, "Rob01");
}
