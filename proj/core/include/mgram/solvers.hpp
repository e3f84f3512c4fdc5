#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mgram/error.hpp"
#include "mgram/lp.hpp"
#include "mgram/model.hpp"

namespace mgram {

struct BinarySolution {
  std::vector<std::uint8_t> x;
  double objective = 0.0;
  bool feasible = false;
  std::vector<double> per_row_slack;  // (A x)_i - b_i

  std::vector<std::string> selected(const SelectionProblem& p) const;
  std::size_t count() const;
};

struct FractionalSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// Scores a 0/1 vector against the instance.
BinarySolution evaluate_binary(const SelectionProblem& p, std::vector<std::uint8_t> x);

/// LP relaxation with 0 <= x <= 1. Throws InternalError carrying the solver
/// status when the simplex does not reach optimality.
FractionalSolution solve_lp(const SelectionProblem& p, const LpOptions& options = {});

struct IpOptions {
  std::size_t node_limit = 1'000'000;
};

struct IpStats {
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
};

/// Raised when branch and bound runs out of nodes; carries the best feasible
/// solution found so far.
class IncompleteSearchError : public Error {
 public:
  IncompleteSearchError(std::size_t nodes, BinarySolution incumbent);
  const BinarySolution& incumbent() const noexcept { return incumbent_; }
  std::size_t nodes() const noexcept { return nodes_; }

 private:
  std::size_t nodes_;
  BinarySolution incumbent_;
};

/// Branch and bound with the LP bound. Among solutions of equal cost the one
/// with fewer grams wins, then the lexicographically smaller gram list.
BinarySolution solve_ip_exact(const SelectionProblem& p, const IpOptions& options = {},
                              IpStats* stats = nullptr);

/// Exhaustive 2^n search with the same tie-breaking; n must be <= 24.
BinarySolution solve_ip_enumerate(const SelectionProblem& p);

/// s_min / (s_max * m*).
double rounding_threshold(const SelectionProblem& p);

/// x_g = 1 when the fractional value reaches the rounding threshold.
BinarySolution round_deterministic(const FractionalSolution& xl, const SelectionProblem& p);

/// x_g = 1 when xl_g >= u_g, u_g uniform in [0, 1) from a 64-bit Mersenne
/// twister seeded with `seed`.
BinarySolution round_randomized(const FractionalSolution& xl, const SelectionProblem& p,
                                std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
template <typename Engine>
double unit_uniform(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mgram
