#include "mgram/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <unordered_map>

#include "mgram/error.hpp"

namespace mgram {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool gram_less(const GramSupport& a, const GramSupport& b) { return a.gram < b.gram; }

}  // namespace

GramSelection select_free(const Corpus& corpus, const SelectionParams& params) {
  if (!(params.selectivity > 0.0 && params.selectivity <= 1.0)) {
    throw DataError("FREE selectivity must lie in (0, 1]");
  }
  GramSelection sel;
  sel.mode = SelectionMode::kFree;
  sel.params = params;
  sel.corpus_fingerprint = corpus.fingerprint();
  const double threshold = params.selectivity * static_cast<double>(corpus.size());

  std::vector<std::string> level;
  for (char a : corpus.alphabet()) level.emplace_back(1, a);
  while (!level.empty()) {
    IterationStats st;
    st.gram_length = level.front().size();
    const auto start = Clock::now();
    const auto supports = count_supports(corpus, level);
    std::vector<std::string> useless;
    for (const auto& g : level) {
      const std::size_t s = supports.at(g);
      if (s == 0) continue;
      ++st.candidates;
      if (static_cast<double>(s) < threshold) {
        sel.grams.push_back({g, s});
        ++st.selected;
      } else {
        useless.push_back(g);
      }
    }
    std::vector<std::string> next;
    next.reserve(useless.size() * corpus.alphabet().size());
    for (const auto& g : useless) {
      for (char a : corpus.alphabet()) next.push_back(g + a);
    }
    st.mgt_ms = ms_since(start);
    sel.stats.push_back(st);
    level = std::move(next);
  }
  std::sort(sel.grams.begin(), sel.grams.end(), gram_less);
  return sel;
}

void BenefitTable::write_csv(std::ostream& out) const {
  out << "gram,benefit,support\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(15);
  for (const auto& e : entries) {
    const bool quote = e.gram.find_first_of(",\"") != std::string::npos;
    if (quote) {
      out << '"';
      for (char ch : e.gram) out << (ch == '"' ? "\"\"" : std::string(1, ch));
      out << '"';
    } else {
      out << e.gram;
    }
    out << ',' << e.benefit << ',' << e.support << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

BenefitTable benefit_table(const Corpus& corpus, std::span<const SubQuery> subqueries,
                           const SelectionParams& params) {
  std::unordered_map<std::string, std::size_t> coverage;
  std::vector<std::string> order;
  for (const auto& sq : subqueries) {
    for (const auto& g : key_grams(sq, params.gram_options()).m_bar_q) {
      auto [it, inserted] = coverage.try_emplace(g, 0);
      if (inserted) order.push_back(g);
      ++it->second;
    }
  }
  const auto supports = count_supports(corpus, order);
  const double n = static_cast<double>(corpus.size());
  BenefitTable table;
  for (const auto& g : order) {
    const std::size_t s = supports.at(g);
    if (s == 0) continue;
    const double per_query = params.benefit == BenefitModel::kPruned
                                 ? n - static_cast<double>(s)
                                 : static_cast<double>(s);
    const double benefit = static_cast<double>(coverage.at(g)) * per_query;
    table.entries.push_back({g, benefit, s});
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const BenefitEntry& a, const BenefitEntry& b) {
              if (a.benefit != b.benefit) return a.benefit > b.benefit;
              return a.gram < b.gram;
            });
  return table;
}

GramSelection select_best(const Corpus& corpus, std::span<const SubQuery> subqueries,
                          const SelectionParams& params) {
  if (params.top_k == 0) throw DataError("BEST needs top_k >= 1");
  GramSelection sel;
  sel.mode = SelectionMode::kBest;
  sel.params = params;
  sel.corpus_fingerprint = corpus.fingerprint();
  IterationStats st;
  const auto start = Clock::now();
  const BenefitTable table = benefit_table(corpus, subqueries, params);
  st.mgt_ms = ms_since(start);
  st.candidates = table.entries.size();
  if (params.top_k > table.entries.size()) {
    sel.warnings.push_back("top_k " + std::to_string(params.top_k) + " exceeds the " +
                           std::to_string(table.entries.size()) +
                           " candidate grams; all candidates selected");
  }
  const std::size_t k = std::min(params.top_k, table.entries.size());
  for (std::size_t i = 0; i < k; ++i) {
    sel.grams.push_back({table.entries[i].gram, table.entries[i].support});
  }
  st.selected = k;
  sel.stats.push_back(st);
  std::sort(sel.grams.begin(), sel.grams.end(), gram_less);
  return sel;
}

GramSelection select_grams(SelectionMode mode, const Corpus& corpus,
                           std::span<const SubQuery> subqueries,
                           const SelectionParams& params) {
  switch (mode) {
    case SelectionMode::kIpms: return select_ipms(corpus, subqueries, params);
    case SelectionMode::kLpmsD:
    case SelectionMode::kLpmsR: return select_lpms(corpus, subqueries, mode, params);
    case SelectionMode::kFree: return select_free(corpus, params);
    case SelectionMode::kBest: return select_best(corpus, subqueries, params);
  }
  throw InternalError("unknown selection mode");
}

}  // namespace mgram
