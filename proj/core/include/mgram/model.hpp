#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgram/corpus.hpp"
#include "mgram/query.hpp"

namespace mgram {

/// One covering constraint: at least one of `grams` must be indexed for the
/// originating sub-query to use the index.
///
/// A literal sub-query yields exactly one row whose grams are its M̄_q. A
/// sub-query with class keys yields one row per instantiation of an anchor
/// window (the class window with the fewest instantiations); each row holds
/// the sub-query's literal grams plus the substrings of that instantiation.
/// Covering every such row is what lets a class key be answered soundly.
struct ConstraintRow {
  std::size_t subquery = 0;
  std::vector<std::string> grams;
};

std::vector<ConstraintRow> constraint_rows(std::span<const SubQuery> subqueries,
                                           const GramOptions& options = {});

struct MatrixEntry {
  std::size_t col = 0;
  double value = 0.0;
};

/// The covering integer program
///
///   minimize   sum_g c_g x_g
///   subject to A x >= b,  x in {0,1}^|G|
///
/// with A[i][j] = s(g_j) when g_j is a gram of row i, b[i] the smallest such
/// support, and c_g = s(g) / (|g| * coverage(g)).
struct SelectionProblem {
  std::vector<std::string> grams;              // columns, first-appearance order
  std::vector<std::size_t> supports;           // per column
  std::vector<std::size_t> coverage;           // rows touching each column
  std::vector<std::vector<MatrixEntry>> rows;  // A, row-major, ascending col
  std::vector<double> b;
  std::vector<double> c;
  std::vector<std::size_t> row_subquery;       // originating sub-query per row
  std::vector<std::size_t> dropped_subqueries;  // rows with no supported gram
  std::size_t m_star = 0;  // most nonzeros in any row
  std::size_t s_min = 0;   // smallest support in G
  std::size_t s_max = 0;   // largest support in G

  std::size_t num_rows() const noexcept { return rows.size(); }
  std::size_t num_cols() const noexcept { return grams.size(); }
};

/// Builds the instance from precomputed rows and supports. Grams with zero or
/// unknown support are excluded; rows left without grams are dropped and
/// their sub-queries reported. Throws DataError when no column survives.
SelectionProblem build_problem(std::span<const ConstraintRow> rows,
                               const std::unordered_map<std::string, std::size_t>& supports);

/// Convenience overload: constraint rows of the workload, supports counted
/// against the corpus.
SelectionProblem build_problem(const Corpus& corpus,
                               std::span<const SubQuery> subqueries,
                               const GramOptions& options = {});

double objective(const SelectionProblem& p, std::span<const double> x);
/// (A x)_i - b_i for each row.
std::vector<double> row_slack(const SelectionProblem& p, std::span<const double> x);

/// Text dump with GRAMS, SUPPORTS, ROWS (sparse triplets), B and C sections;
/// reals use six decimal places.
void write_dump(const SelectionProblem& p, std::ostream& out);
std::string dump_string(const SelectionProblem& p);
/// Parses write_dump output. Coverage, m*, s_min and s_max are recomputed.
SelectionProblem read_dump(std::istream& in);

}  // namespace mgram
