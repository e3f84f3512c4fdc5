#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mgram/query.hpp"
#include "oracles.hpp"

using namespace mgram;

namespace {

std::vector<std::string> literal_keys(const SubQuery& sq) {
  std::vector<std::string> out;
  for (const auto& k : sq.keys) out.push_back(k.literal());
  return out;
}

}  // namespace

TEST(Query, AlternationExpandsIntoFourSubQueries) {
  const auto sqs = expand_or(parse_query("(ex)|(pr).{1,3}(eed)|(ess)"));
  ASSERT_EQ(sqs.size(), 4u);
  std::vector<std::vector<std::string>> got;
  for (const auto& sq : sqs) {
    got.push_back(literal_keys(sq));
    ASSERT_EQ(sq.gaps.size(), 1u);
    EXPECT_EQ(sq.gaps[0], (Gap{1, 3}));
  }
  std::sort(got.begin(), got.end());
  const std::vector<std::vector<std::string>> want{
      {"ex", "eed"}, {"ex", "ess"}, {"pr", "eed"}, {"pr", "ess"}};
  EXPECT_EQ(got, want);
}

TEST(Query, BranchesInsideOneGroup) {
  const auto sqs = expand_or(parse_query("(pr|re).{1,2}(cede)"));
  ASSERT_EQ(sqs.size(), 2u);
  EXPECT_EQ(literal_keys(sqs[0]), (std::vector<std::string>{"pr", "cede"}));
  EXPECT_EQ(literal_keys(sqs[1]), (std::vector<std::string>{"re", "cede"}));
}

TEST(Query, IdenticalSubQueriesAreMarked) {
  const auto sqs = expand_or(parse_query("(ab)|(ab).{0,2}(cd)"));
  ASSERT_EQ(sqs.size(), 2u);
  EXPECT_FALSE(sqs[0].duplicate_of.has_value());
  ASSERT_TRUE(sqs[1].duplicate_of.has_value());
  EXPECT_EQ(*sqs[1].duplicate_of, 0u);
}

TEST(Query, ExpansionCapIsEnforced) {
  std::string text;
  for (int i = 0; i < 11; ++i) text += "(a)|(b)";  // 2^11 sub-queries
  const auto q = parse_query(text);
  EXPECT_EQ(expansion_count(q), 2048u);
  EXPECT_THROW(expand_or(q, 0, 1024), ExpansionLimitError);
}

TEST(Query, ParseErrorsCarryOffsets) {
  for (const std::string bad : {"(ab", "(ab).{3,1}(c)", "(ab).{x}(c)", "", "(a)[b"}) {
    try {
      parse_query(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const ParseError& e) {
      EXPECT_LE(e.offset(), bad.size()) << bad;
    }
  }
}

TEST(Query, ClassesAndEscapes) {
  const auto sqs = expand_or(parse_query("(a[bc]\\.).{0,1}(d)"));
  ASSERT_EQ(sqs.size(), 1u);
  const Key& k = sqs[0].keys[0];
  EXPECT_EQ(k.length(), 3u);
  EXPECT_FALSE(k.is_literal());
  EXPECT_TRUE(k.at(1).test('b'));
  EXPECT_TRUE(k.at(1).test('c'));
  EXPECT_TRUE(k.at(2).test('.'));
  EXPECT_EQ(k.instantiation_count(0, 3, 100), 2u);
  const auto inst = k.instantiations(0, 3, 100);
  ASSERT_TRUE(inst.has_value());
  EXPECT_EQ(*inst, (std::vector<std::string>{"ab.", "ac."}));
  EXPECT_FALSE(k.instantiations(0, 3, 1).has_value());
}

TEST(Query, LiteralClosureMatchesSubstringOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto records = fixture::random_records(rng, 1, 12, 20, "abcd");
    const auto sqs = expand_or(parse_query(fixture::query_from(rng, records[0], 3, 6, 3)));
    for (std::size_t min_len : {1u, 2u, 3u}) {
      const auto sets = key_grams(sqs[0], {min_len, 3, 4096});
      std::set<std::string> want, m_q;
      for (const auto& k : sqs[0].keys) {
        const auto subs = oracle::substrings(k.literal(), min_len);
        want.insert(subs.begin(), subs.end());
        if (k.length() >= min_len) m_q.insert(k.literal());
      }
      EXPECT_EQ(std::set<std::string>(sets.m_bar_q.begin(), sets.m_bar_q.end()), want);
      EXPECT_EQ(std::set<std::string>(sets.m_q.begin(), sets.m_q.end()), m_q);
      EXPECT_EQ(std::set<std::string>(sets.m_bar_q.begin(), sets.m_bar_q.end()).size(),
                sets.m_bar_q.size());
    }
  }
}

TEST(Query, ClassWindowsAreInstantiated) {
  const auto sqs = expand_or(parse_query("(x[ab]y)"));
  const auto sets = key_grams(sqs[0], {2, 3, 4096});
  const std::set<std::string> got(sets.m_bar_q.begin(), sets.m_bar_q.end());
  const std::set<std::string> want{"xa", "xb", "ay", "by", "xay", "xby"};
  EXPECT_EQ(got, want);
}

TEST(Prosite, TranslatesRunsAndWildcards) {
  const RegexQuery q = prosite_to_query("C-x(2,4)-[ST]-G-x-W.");
  const auto sqs = expand_or(q);
  ASSERT_EQ(sqs.size(), 1u);
  const auto& sq = sqs[0];
  ASSERT_EQ(sq.keys.size(), 3u);
  EXPECT_EQ(sq.keys[0].literal(), "C");
  EXPECT_EQ(sq.keys[1].length(), 2u);
  EXPECT_EQ(sq.keys[2].literal(), "W");
  EXPECT_EQ(sq.gaps[0], (Gap{2, 4}));
  EXPECT_EQ(sq.gaps[1], (Gap{1, 1}));
}

TEST(Prosite, RepeatedResidueAndUnsupportedConstructs) {
  const auto sqs = expand_or(prosite_to_query("C(3)-x-H"));
  EXPECT_EQ(sqs[0].keys[0].literal(), "CCC");
  EXPECT_THROW(prosite_to_query("<M-x(2)-C"), UnsupportedConstruct);
  EXPECT_THROW(prosite_to_query("C-{P}-x(2)-C"), UnsupportedConstruct);
  EXPECT_THROW(prosite_to_query("C-x(2)"), UnsupportedConstruct);
  EXPECT_THROW(prosite_to_query("C-x(4,2)-H"), ParseError);
}
