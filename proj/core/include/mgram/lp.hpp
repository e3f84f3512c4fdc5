#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mgram/model.hpp"

namespace mgram {

/// minimize c'x  subject to  A x >= b,  0 <= x <= upper.
///
/// Costs must be nonnegative: the solver is a revised dual simplex started
/// from the all-slack basis, which is dual feasible exactly when c >= 0.
/// Finite upper bounds are added as explicit rows only when the unbounded
/// optimum violates them.
struct CoveringLp {
  std::size_t num_cols = 0;
  std::vector<std::vector<MatrixEntry>> rows;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> upper;  // empty means no upper bounds
};

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit };

struct LpOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t refactor_every = 64;  // pivots between refactorizations, at least the row count
  std::size_t max_iterations = 0;  // 0 selects 50 * (rows + cols) + 1000
};

struct LpResult {
  LpStatus status = LpStatus::kOptimal;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

LpResult solve_covering_lp(const CoveringLp& lp, const LpOptions& options = {});

std::string to_string(LpStatus status);

}  // namespace mgram
