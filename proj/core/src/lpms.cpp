#include "mgram/lpms.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "mgram/model.hpp"

namespace mgram {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Decorrelates per-round seeds derived from one user seed.
std::uint64_t round_seed(std::uint64_t seed, std::size_t round) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (round + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t count_satisfied(const std::vector<ConstraintRow>& rows,
                            const std::vector<GramSupport>& picked) {
  std::unordered_set<std::string> chosen;
  for (const auto& g : picked) chosen.insert(g.gram);
  std::size_t n = 0;
  for (const auto& row : rows) {
    n += std::any_of(row.grams.begin(), row.grams.end(),
                     [&](const std::string& g) { return chosen.count(g) != 0; });
  }
  return n;
}

}  // namespace

std::vector<std::string> GramSelection::gram_texts() const {
  std::vector<std::string> out;
  out.reserve(grams.size());
  for (const auto& g : grams) out.push_back(g.gram);
  return out;
}

std::size_t GramSelection::total_support() const {
  std::size_t total = 0;
  for (const auto& g : grams) total += g.support;
  return total;
}

double GramSelection::mgt_ms() const {
  double t = 0.0;
  for (const auto& s : stats) t += s.mgt_ms;
  return t;
}

double GramSelection::mct_ms() const {
  double t = 0.0;
  for (const auto& s : stats) t += s.mct_ms;
  return t;
}

double GramSelection::st_ms() const {
  double t = 0.0;
  for (const auto& s : stats) t += s.st_ms;
  return t;
}

std::optional<PrefixViolation> verify_prefix_free(std::span<const std::string> grams) {
  std::vector<std::string> sorted(grams.begin(), grams.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  // In sorted order a string's extensions directly follow it, so checking
  // neighbours is enough.
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const std::string& a = sorted[i - 1];
    const std::string& b = sorted[i];
    if (b.size() > a.size() && b.compare(0, a.size(), a) == 0) {
      return PrefixViolation{a, b};
    }
  }
  return std::nullopt;
}

GramSelection select_lpms(const Corpus& corpus, std::span<const SubQuery> subqueries,
                          SelectionMode mode, const SelectionParams& params) {
  if (mode != SelectionMode::kLpmsD && mode != SelectionMode::kLpmsR) {
    throw InternalError("select_lpms needs mode lpms-d or lpms-r");
  }
  if (subqueries.empty()) throw DataError("empty workload");
  if (params.min_len == 0) throw DataError("min_len must be at least 1");

  GramSelection sel;
  sel.mode = mode;
  sel.params = params;
  sel.corpus_fingerprint = corpus.fingerprint();

  auto start = Clock::now();
  const auto rows = constraint_rows(subqueries, params.gram_options());
  sel.rows_total = rows.size();
  std::unordered_map<std::string, std::vector<std::size_t>> gram_rows;
  std::unordered_set<std::string> prefixes;  // proper prefixes of row grams
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& g : rows[i].grams) {
      auto& list = gram_rows[g];
      if (list.empty() || list.back() != i) list.push_back(i);
      for (std::size_t len = 1; len < g.size(); ++len) prefixes.insert(g.substr(0, len));
    }
  }
  std::vector<bool> live(rows.size(), true);
  double setup_ms = ms_since(start);

  std::vector<std::string> expand{""};
  for (std::size_t round = 0; !expand.empty(); ++round) {
    IterationStats st;
    st.gram_length = expand.front().size() + 1;
    st.mgt_ms = setup_ms;
    setup_ms = 0.0;
    start = Clock::now();

    std::vector<std::string> next, children;
    for (const auto& parent : expand) {
      for (char a : corpus.alphabet()) {
        std::string child = parent + a;
        if (child.size() < params.min_len) {
          if (prefixes.count(child) != 0) next.push_back(std::move(child));
          continue;
        }
        auto it = gram_rows.find(child);
        if (it == gram_rows.end()) continue;
        if (std::any_of(it->second.begin(), it->second.end(),
                        [&](std::size_t r) { return live[r]; })) {
          children.push_back(std::move(child));
        }
      }
    }
    auto supports = count_supports(corpus, children);
    std::erase_if(children, [&](const std::string& g) { return supports[g] == 0; });
    st.mgt_ms += ms_since(start);

    if (children.empty()) {
      if (!next.empty()) sel.stats.push_back(st);
      expand = std::move(next);
      continue;
    }

    start = Clock::now();
    const std::unordered_set<std::string> child_set(children.begin(), children.end());
    std::vector<ConstraintRow> local;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!live[i]) continue;
      ConstraintRow r{i, {}};
      for (const auto& g : rows[i].grams) {
        if (child_set.count(g) != 0) r.grams.push_back(g);
      }
      if (!r.grams.empty()) local.push_back(std::move(r));
    }
    const SelectionProblem p = build_problem(local, supports);
    st.mct_ms = ms_since(start);
    st.candidates = p.num_cols();
    st.rows = p.num_rows();

    start = Clock::now();
    const FractionalSolution xl = solve_lp(p);
    BinarySolution xb = mode == SelectionMode::kLpmsD
                            ? round_deterministic(xl, p)
                            : round_randomized(xl, p, round_seed(params.seed, round));
    if (mode == SelectionMode::kLpmsR && xb.count() == 0) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < p.num_cols(); ++j) {
        if (p.c[j] < p.c[best] || (p.c[j] == p.c[best] && p.grams[j] < p.grams[best])) best = j;
      }
      xb.x[best] = 1;
      st.forced = true;
    }
    st.st_ms = ms_since(start);

    std::unordered_set<std::string> picked;
    for (std::size_t j = 0; j < p.num_cols(); ++j) {
      if (!xb.x[j]) continue;
      picked.insert(p.grams[j]);
      sel.grams.push_back({p.grams[j], p.supports[j]});
      ++st.selected;
      for (std::size_t r : gram_rows.at(p.grams[j])) {
        if (live[r]) {
          live[r] = false;
          ++st.satisfied;
        }
      }
    }
    for (auto& g : children) {
      if (picked.count(g) == 0 && prefixes.count(g) != 0) next.push_back(std::move(g));
    }
    sel.stats.push_back(st);
    expand = std::move(next);
  }

  std::sort(sel.grams.begin(), sel.grams.end(),
            [](const GramSupport& a, const GramSupport& b) { return a.gram < b.gram; });
  sel.rows_satisfied = count_satisfied(rows, sel.grams);
  return sel;
}

GramSelection select_ipms(const Corpus& corpus, std::span<const SubQuery> subqueries,
                          const SelectionParams& params) {
  if (subqueries.empty()) throw DataError("empty workload");
  GramSelection sel;
  sel.mode = SelectionMode::kIpms;
  sel.params = params;
  sel.corpus_fingerprint = corpus.fingerprint();

  IterationStats st;
  auto start = Clock::now();
  const auto rows = constraint_rows(subqueries, params.gram_options());
  sel.rows_total = rows.size();
  std::vector<std::string> all;
  for (const auto& r : rows) all.insert(all.end(), r.grams.begin(), r.grams.end());
  const auto supports = count_supports(corpus, all);
  st.mgt_ms = ms_since(start);

  const bool any = std::any_of(supports.begin(), supports.end(),
                               [](const auto& kv) { return kv.second > 0; });
  if (any) {
    start = Clock::now();
    const SelectionProblem p = build_problem(rows, supports);
    st.mct_ms = ms_since(start);
    st.candidates = p.num_cols();
    st.rows = p.num_rows();

    start = Clock::now();
    const BinarySolution x = solve_ip_exact(p, IpOptions{params.node_limit});
    st.st_ms = ms_since(start);
    for (std::size_t j = 0; j < p.num_cols(); ++j) {
      if (x.x[j]) sel.grams.push_back({p.grams[j], p.supports[j]});
    }
    st.selected = sel.grams.size();
  }
  sel.stats.push_back(st);
  std::sort(sel.grams.begin(), sel.grams.end(),
            [](const GramSupport& a, const GramSupport& b) { return a.gram < b.gram; });
  sel.rows_satisfied = count_satisfied(rows, sel.grams);
  sel.stats.back().satisfied = sel.rows_satisfied;
  return sel;
}

}  // namespace mgram
