#include "mgram/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mgram {
namespace {

constexpr double kCostTol = 1e-9;
constexpr double kIntTol = 1e-7;
constexpr double kRowTol = 1e-9;

// True when candidate `a` beats `b` under (cost, count, gram list) order.
bool better(const SelectionProblem& p, const BinarySolution& a, const BinarySolution& b) {
  const double tol = kCostTol * std::max(1.0, std::abs(b.objective));
  if (a.objective < b.objective - tol) return true;
  if (a.objective > b.objective + tol) return false;
  const std::size_t ca = a.count(), cb = b.count();
  if (ca != cb) return ca < cb;
  return a.selected(p) < b.selected(p);
}

// Coefficients min(a_ij, b_i): a single gram never needs to contribute more
// than the right-hand side, which tightens the LP bound inside the search.
std::vector<std::vector<MatrixEntry>> tightened_rows(const SelectionProblem& p) {
  auto rows = p.rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (auto& e : rows[i]) e.value = std::min(e.value, p.b[i]);
  }
  return rows;
}

class BranchAndBound {
 public:
  BranchAndBound(const SelectionProblem& p, const IpOptions& options)
      : p_(p), options_(options), rows_(tightened_rows(p)) {}

  BinarySolution run(IpStats* stats) {
    const std::size_t n = p_.num_cols();
    best_ = greedy();
    fixed_.assign(n, -1);
    search();
    if (stats != nullptr) {
      stats->nodes = nodes_;
      stats->lp_iterations = lp_iterations_;
    }
    if (exhausted_) throw IncompleteSearchError(nodes_, best_);
    return best_;
  }

 private:
  // Greedy cover by cost per unit of residual coverage, then drop redundant
  // columns in decreasing cost order.
  BinarySolution greedy() const {
    const std::size_t n = p_.num_cols(), m = p_.num_rows();
    std::vector<double> residual = p_.b;
    std::vector<std::uint8_t> x(n, 0);
    std::vector<std::vector<MatrixEntry>> cols(n);
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& e : rows_[i]) cols[e.col].push_back({i, e.value});
    }
    while (true) {
      bool open = false;
      for (double r : residual) open = open || r > kRowTol;
      if (!open) break;
      std::size_t pick = n;
      double pick_ratio = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (x[j]) continue;
        double gain = 0.0;
        for (const auto& e : cols[j]) {
          if (residual[e.col] > kRowTol) gain += std::min(e.value, residual[e.col]) / p_.b[e.col];
        }
        if (gain <= 0.0) continue;
        const double ratio = p_.c[j] / gain;
        if (pick == n || ratio < pick_ratio) {
          pick = j;
          pick_ratio = ratio;
        }
      }
      if (pick == n) throw InternalError("covering instance is infeasible");
      x[pick] = 1;
      for (const auto& e : cols[pick]) residual[e.col] -= e.value;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_.c[a] > p_.c[b]; });
    for (std::size_t j : order) {
      if (!x[j]) continue;
      bool needed = false;
      for (const auto& e : cols[j]) needed = needed || residual[e.col] + e.value > kRowTol;
      if (needed) continue;
      x[j] = 0;
      for (const auto& e : cols[j]) residual[e.col] += e.value;
    }
    return evaluate_binary(p_, std::move(x));
  }

  void search() {
    if (exhausted_) return;
    if (++nodes_ > options_.node_limit) {
      exhausted_ = true;
      return;
    }
    const std::size_t n = p_.num_cols();

    // Residual instance over the free columns.
    std::vector<double> residual = p_.b;
    double fixed_cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed_[j] == 1) fixed_cost += p_.c[j];
    }
    CoveringLp lp;
    std::vector<std::size_t> local(n, n), global;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      double have = 0.0, reachable = 0.0;
      for (const auto& e : rows_[i]) {
        if (fixed_[e.col] == 1) have += e.value;
        if (fixed_[e.col] == -1) reachable += e.value;
      }
      residual[i] -= have;
      if (residual[i] <= kRowTol) continue;
      if (reachable < residual[i] - kRowTol) return;  // infeasible node
      std::vector<MatrixEntry> row;
      for (const auto& e : rows_[i]) {
        if (fixed_[e.col] != -1) continue;
        if (local[e.col] == n) {
          local[e.col] = global.size();
          global.push_back(e.col);
        }
        row.push_back({local[e.col], std::min(e.value, residual[i])});
      }
      lp.rows.push_back(std::move(row));
      lp.b.push_back(residual[i]);
    }

    std::vector<std::uint8_t> base(n, 0);
    for (std::size_t j = 0; j < n; ++j) base[j] = fixed_[j] == 1 ? 1 : 0;
    if (lp.rows.empty()) {
      consider(evaluate_binary(p_, std::move(base)));
      return;
    }
    lp.num_cols = global.size();
    for (std::size_t j : global) lp.c.push_back(p_.c[j]);
    lp.upper.assign(lp.num_cols, 1.0);
    const LpResult r = solve_covering_lp(lp);
    lp_iterations_ += r.iterations;
    if (r.status == LpStatus::kInfeasible) return;
    if (r.status != LpStatus::kOptimal) {
      throw InternalError("LP bound failed inside branch and bound: " + to_string(r.status));
    }
    const double bound = fixed_cost + r.objective;
    if (bound > best_.objective + kCostTol * std::max(1.0, std::abs(best_.objective))) return;

    std::size_t branch = lp.num_cols;
    double frac_best = 0.0;
    for (std::size_t k = 0; k < lp.num_cols; ++k) {
      const double v = r.x[k];
      const double frac = std::min(v, 1.0 - v);
      if (frac > kIntTol && frac > frac_best + 1e-12) {
        branch = k;
        frac_best = frac;
      }
    }
    if (branch == lp.num_cols) {
      for (std::size_t k = 0; k < lp.num_cols; ++k) {
        if (r.x[k] > 0.5) base[global[k]] = 1;
      }
      BinarySolution s = evaluate_binary(p_, std::move(base));
      if (s.feasible) consider(std::move(s));
      return;
    }
    const std::size_t j = global[branch];
    const bool up_first = r.x[branch] >= 0.5;
    for (int pass = 0; pass < 2; ++pass) {
      fixed_[j] = static_cast<std::int8_t>((pass == 0) == up_first ? 1 : 0);
      search();
    }
    fixed_[j] = -1;
  }

  void consider(BinarySolution s) {
    if (s.feasible && better(p_, s, best_)) best_ = std::move(s);
  }

  const SelectionProblem& p_;
  IpOptions options_;
  std::vector<std::vector<MatrixEntry>> rows_;
  std::vector<std::int8_t> fixed_;
  BinarySolution best_;
  std::size_t nodes_ = 0;
  std::size_t lp_iterations_ = 0;
  bool exhausted_ = false;
};

}  // namespace

std::vector<std::string> BinarySolution::selected(const SelectionProblem& p) const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j]) out.push_back(p.grams[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t BinarySolution::count() const {
  return static_cast<std::size_t>(std::count(x.begin(), x.end(), std::uint8_t{1}));
}

IncompleteSearchError::IncompleteSearchError(std::size_t nodes, BinarySolution incumbent)
    : Error(ErrorKind::kInternal,
            "branch and bound exhausted its budget of " + std::to_string(nodes - 1) +
                " nodes; best incumbent has cost " + std::to_string(incumbent.objective)),
      nodes_(nodes),
      incumbent_(std::move(incumbent)) {}

BinarySolution evaluate_binary(const SelectionProblem& p, std::vector<std::uint8_t> x) {
  if (x.size() != p.num_cols()) throw InternalError("solution length does not match the instance");
  BinarySolution s;
  std::vector<double> xd(x.begin(), x.end());
  s.objective = objective(p, xd);
  s.per_row_slack = row_slack(p, xd);
  s.feasible = std::all_of(s.per_row_slack.begin(), s.per_row_slack.end(),
                           [](double v) { return v >= -kRowTol; });
  s.x = std::move(x);
  return s;
}

FractionalSolution solve_lp(const SelectionProblem& p, const LpOptions& options) {
  CoveringLp lp;
  lp.num_cols = p.num_cols();
  lp.rows = p.rows;
  lp.b = p.b;
  lp.c = p.c;
  lp.upper.assign(lp.num_cols, 1.0);
  LpResult r = solve_covering_lp(lp, options);
  if (r.status != LpStatus::kOptimal) {
    throw InternalError("LP relaxation did not reach optimality: " + to_string(r.status));
  }
  return {std::move(r.x), r.objective, r.iterations};
}

BinarySolution solve_ip_exact(const SelectionProblem& p, const IpOptions& options,
                              IpStats* stats) {
  if (p.num_rows() == 0) {
    if (stats != nullptr) *stats = {};
    return evaluate_binary(p, std::vector<std::uint8_t>(p.num_cols(), 0));
  }
  return BranchAndBound(p, options).run(stats);
}

BinarySolution solve_ip_enumerate(const SelectionProblem& p) {
  const std::size_t n = p.num_cols();
  if (n > 24) throw DataError("enumeration is limited to 24 columns, instance has " + std::to_string(n));
  BinarySolution best = evaluate_binary(p, std::vector<std::uint8_t>(n, 1));
  std::vector<std::uint8_t> x(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t j = 0; j < n; ++j) x[j] = (mask >> j) & 1U;
    BinarySolution s = evaluate_binary(p, x);
    if (s.feasible && better(p, s, best)) best = std::move(s);
  }
  return best;
}

double rounding_threshold(const SelectionProblem& p) {
  if (p.s_min == 0 || p.s_max == 0 || p.m_star == 0) {
    throw InternalError("rounding threshold needs positive s_min, s_max and m*");
  }
  return static_cast<double>(p.s_min) /
         (static_cast<double>(p.s_max) * static_cast<double>(p.m_star));
}

BinarySolution round_deterministic(const FractionalSolution& xl, const SelectionProblem& p) {
  const double threshold = rounding_threshold(p);
  std::vector<std::uint8_t> x(p.num_cols(), 0);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = xl.x.at(j) >= threshold - 1e-9 ? 1 : 0;
  return evaluate_binary(p, std::move(x));
}

BinarySolution round_randomized(const FractionalSolution& xl, const SelectionProblem& p,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> x(p.num_cols(), 0);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = xl.x.at(j) >= unit_uniform(rng) ? 1 : 0;
  return evaluate_binary(p, std::move(x));
}

}  // namespace mgram
