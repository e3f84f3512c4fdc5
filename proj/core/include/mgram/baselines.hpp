#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mgram/corpus.hpp"
#include "mgram/lpms.hpp"
#include "mgram/query.hpp"

namespace mgram {

/// Workload-oblivious baseline. Level k holds length-k grams: those with
/// support below selectivity * |records| are selected, the rest are extended
/// by one character to seed level k + 1. The result is prefix-free and each
/// gram is minimal (no selected proper prefix).
GramSelection select_free(const Corpus& corpus, const SelectionParams& params = {});

struct BenefitEntry {
  std::string gram;
  double benefit = 0.0;
  std::size_t support = 0;
};

/// Entries ordered by benefit descending, then gram ascending.
struct BenefitTable {
  std::vector<BenefitEntry> entries;

  /// CSV with header "gram,benefit,support".
  void write_csv(std::ostream& out) const;
};

/// Scores every gram of the workload's M̄ sets that occurs in the corpus.
/// Under kPruned, benefit(g) = sum over sub-queries q with g in M̄_q of
/// (|records| - s(g)); kMatched sums s(g) instead.
BenefitTable benefit_table(const Corpus& corpus, std::span<const SubQuery> subqueries,
                           const SelectionParams& params = {});

/// The top_k grams of the benefit table. Not prefix-free in general.
GramSelection select_best(const Corpus& corpus, std::span<const SubQuery> subqueries,
                          const SelectionParams& params = {});

/// Runs whichever selection algorithm `mode` names.
GramSelection select_grams(SelectionMode mode, const Corpus& corpus,
                           std::span<const SubQuery> subqueries,
                           const SelectionParams& params = {});

}  // namespace mgram
