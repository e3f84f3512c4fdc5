#pragma once

#include <random>
#include <string>
#include <vector>

#include "mgram/corpus.hpp"
#include "mgram/query.hpp"

namespace fixture {

inline const std::vector<std::string>& words() {
  static const std::vector<std::string> w{"succeed", "proceed",    "precede", "recede",
                                          "secession", "exceed", "succession", "excess"};
  return w;
}

inline mgram::Corpus word_corpus() { return mgram::Corpus(words()); }

inline std::vector<mgram::RegexQuery> word_queries() {
  return {mgram::parse_query("(ex)|(pr).{1,3}(eed)|(ess)"),
          mgram::parse_query("(pr|re).{1,2}(cede)")};
}

inline std::vector<std::string> random_records(std::mt19937_64& rng, std::size_t count,
                                               std::size_t min_len, std::size_t max_len,
                                               const std::string& alphabet) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string r(len(rng), ' ');
    for (auto& c : r) c = alphabet[ch(rng)];
    out.push_back(std::move(r));
  }
  return out;
}

// A literal query whose keys are cut from `source`, so it matches at least
// that record.
inline std::string query_from(std::mt19937_64& rng, const std::string& source,
                              std::size_t keys, std::size_t max_key, std::size_t max_gap) {
  std::string out;
  std::size_t pos = std::uniform_int_distribution<std::size_t>(0, source.size() / 3)(rng);
  for (std::size_t k = 0; k < keys; ++k) {
    const std::size_t len = std::uniform_int_distribution<std::size_t>(1, max_key)(rng);
    if (pos + len > source.size()) break;
    if (k > 0) {
      const std::size_t lo = std::uniform_int_distribution<std::size_t>(0, 1)(rng);
      out += ".{" + std::to_string(lo) + "," + std::to_string(lo + max_gap) + "}";
    }
    out += "(" + source.substr(pos, len) + ")";
    pos += len + std::uniform_int_distribution<std::size_t>(1, max_gap)(rng);
  }
  if (out.empty()) out = "(" + source.substr(0, 1) + ")";
  return out;
}

}  // namespace fixture
