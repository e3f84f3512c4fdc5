#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mgram/matcher.hpp"
#include "mgram/synthgen.hpp"

using namespace mgram;

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(Synthgen, UniformCorpusEchoesSpec) {
  CorpusSpec spec;
  spec.record_count = 20;
  const Corpus c = gen_corpus(spec);
  ASSERT_EQ(c.size(), 20u);
  for (const auto& r : c.records()) {
    EXPECT_EQ(r.size(), 100u);
    for (char ch : r) EXPECT_TRUE(ch >= 'A' && ch <= 'Z');
  }
}

TEST(Synthgen, SameSeedSameBytes) {
  CorpusSpec spec;
  spec.record_count = 200;
  spec.min_record_len = 30;
  spec.max_record_len = 90;
  spec.distribution = SupportDistribution::kNormal;
  spec.sd = 20;
  spec.gram_count = 50;
  spec.seed = 77;
  EXPECT_EQ(gen_corpus(spec).fingerprint(), gen_corpus(spec).fingerprint());
  spec.seed = 78;
  const auto other = gen_corpus(spec).fingerprint();
  spec.seed = 77;
  EXPECT_NE(gen_corpus(spec).fingerprint(), other);

  WorkloadSpec ws;
  ws.seed = 3;
  const Corpus c = gen_corpus(spec);
  EXPECT_EQ(gen_workload(c, ws).lines, gen_workload(c, ws).lines);
}

TEST(Synthgen, PlantedSupportsAreReachedAndRankCorrelated) {
  CorpusSpec spec;
  spec.record_count = 3000;
  spec.min_record_len = 60;
  spec.max_record_len = 120;
  spec.distribution = SupportDistribution::kNormal;
  spec.sd = 100;
  spec.gram_count = 300;
  spec.seed = 5;
  const GeneratedCorpus g = gen_corpus_detailed(spec);
  ASSERT_FALSE(g.planted.empty());
  std::vector<double> drawn, measured;
  for (const auto& p : g.planted) {
    const std::size_t s = support(g.corpus, p.gram);
    EXPECT_GE(s, p.support) << p.gram;
    // Short grams also appear by chance; the correlation is over grams long
    // enough for the background to be negligible.
    if (p.gram.size() >= 3) {
      drawn.push_back(static_cast<double>(p.support));
      measured.push_back(static_cast<double>(s));
    }
  }
  ASSERT_GE(drawn.size(), 20u);
  EXPECT_GE(spearman(drawn, measured), 0.9);
}

TEST(Synthgen, InfeasibleSupportIsAnError) {
  CorpusSpec spec;
  spec.record_count = 10;
  spec.distribution = SupportDistribution::kNormal;
  spec.sd = 1000;
  spec.gram_count = 20;
  EXPECT_THROW(gen_corpus(spec), DataError);
}

TEST(Synthgen, QueriesMatchTheirSeedRecords) {
  CorpusSpec spec;
  spec.record_count = 300;
  spec.min_record_len = 20;
  spec.max_record_len = 120;
  spec.seed = 9;
  const Corpus c = gen_corpus(spec);
  WorkloadSpec ws;
  ws.sample_fraction = 0.5;
  ws.seed = 4;
  const GeneratedWorkload w = gen_workload(c, ws);
  ASSERT_FALSE(w.queries.empty());
  ASSERT_EQ(w.queries.size(), w.sources.size());
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    const auto sqs = expand_or(w.queries[i]);
    ASSERT_EQ(sqs.size(), 1u);
    EXPECT_TRUE(matches(sqs[0], c.record(w.sources[i]))) << w.lines[i];
    EXPECT_LE(sqs[0].keys.size(), ws.key_count);
    for (const auto& k : sqs[0].keys) {
      EXPECT_GE(k.length(), ws.min_key_len);
      EXPECT_LE(k.length(), ws.max_key_len);
    }
    for (const auto& g : sqs[0].gaps) {
      EXPECT_EQ(g.lo, 0u);
      EXPECT_EQ(g.hi % 10, 9u);
    }
  }
  ws.sample_fraction = 0.0;
  EXPECT_TRUE(gen_workload(c, ws).queries.empty());
  ws.sample_fraction = 1.0;
  ws.max_queries = 7;
  EXPECT_EQ(gen_workload(c, ws).queries.size(), 7u);
}

TEST(Synthgen, SpecFiles) {
  std::istringstream cs("# comment\nalphabet=A-D\nrecords=12\nmin_len=5\nmax_len=9\n"
                        "distribution=normal\nsd=3\ngrams=4\nseed=2\n");
  const CorpusSpec c = parse_corpus_spec(cs);
  EXPECT_EQ(expand_alphabet(c.alphabet), "ABCD");
  EXPECT_EQ(c.record_count, 12u);
  EXPECT_EQ(c.distribution, SupportDistribution::kNormal);
  std::istringstream ws("keys=2\nmax_gap=9\nsample_fraction=0.5\n");
  const WorkloadSpec w = parse_workload_spec(ws);
  EXPECT_EQ(w.key_count, 2u);
  EXPECT_EQ(w.max_gap, 9u);
  std::istringstream bad("colour=blue\n");
  EXPECT_THROW(parse_corpus_spec(bad), DataError);
  std::istringstream badval("records=many\n");
  EXPECT_THROW(parse_corpus_spec(badval), DataError);
}

TEST(Synthgen, PortableRandomHelpers) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_below(rng, 7), 7u);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
  // Fixed value under a fixed seed, identical on every platform.
  std::mt19937_64 a(2024), b(2024);
  EXPECT_EQ(uniform_below(a, 1000), uniform_below(b, 1000));
}
