#include "mgram/lp.hpp"

#include <algorithm>
#include <cmath>

#include "mgram/error.hpp"

namespace mgram {
namespace {

// Revised dual simplex over  A x - s = b,  x, s >= 0  with an explicit dense
// basis inverse. Rows are scaled so that |b_i| = 1 (or max |a_ij| = 1).
class DualSimplex {
 public:
  DualSimplex(std::size_t num_cols, const std::vector<std::vector<MatrixEntry>>& rows,
              const std::vector<double>& b, const std::vector<double>& c,
              const LpOptions& options)
      : n_(num_cols), m_(rows.size()), c_(c), options_(options) {
    b_.resize(m_);
    columns_.assign(n_, {});
    for (std::size_t i = 0; i < m_; ++i) {
      double scale = std::abs(b[i]);
      if (scale < 1e-12) {
        scale = 0.0;
        for (const auto& e : rows[i]) scale = std::max(scale, std::abs(e.value));
        if (scale < 1e-12) scale = 1.0;
      }
      b_[i] = b[i] / scale;
      for (const auto& e : rows[i]) {
        if (e.value != 0.0) columns_[e.col].push_back({i, e.value / scale});
      }
    }
  }

  LpResult run() {
    LpResult result;
    const std::size_t total = n_ + m_;
    basis_.resize(m_);
    is_basic_.assign(total, false);
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      is_basic_[n_ + i] = true;
    }
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = -1.0;
    xb_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) xb_[i] = -b_[i];
    d_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) d_[j] = c_[j];

    const std::size_t limit = options_.max_iterations != 0
                                  ? options_.max_iterations
                                  : 50 * (m_ + n_) + 1000;
    std::vector<double> rho(m_), alpha(total), u(m_);
    std::size_t since_refactor = 0;
    while (true) {
      // Leaving row: most infeasible basic variable.
      std::size_t r = m_;
      double worst = -options_.feasibility_tol;
      for (std::size_t i = 0; i < m_; ++i) {
        if (xb_[i] < worst) {
          worst = xb_[i];
          r = i;
        }
      }
      if (r == m_) break;
      if (result.iterations >= limit) {
        result.status = LpStatus::kIterationLimit;
        return finish(result);
      }

      std::copy_n(binv_.begin() + static_cast<std::ptrdiff_t>(r * m_), m_, rho.begin());
      // Entering column: dual ratio test over nonbasic columns with alpha < 0.
      std::size_t q = total;
      double best_ratio = 0.0, best_alpha = 0.0;
      for (std::size_t j = 0; j < total; ++j) {
        if (is_basic_[j]) continue;
        double a = 0.0;
        if (j < n_) {
          for (const auto& e : columns_[j]) a += rho[e.col] * e.value;
        } else {
          a = -rho[j - n_];
        }
        alpha[j] = a;
        if (a >= -options_.pivot_tol) continue;
        const double ratio = std::max(d_[j], 0.0) / -a;
        if (q == total || ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && -a > best_alpha * (1.0 + 1e-9))) {
          q = j;
          best_ratio = ratio;
          best_alpha = -a;
        }
      }
      if (q == total) {
        result.status = LpStatus::kInfeasible;
        return finish(result);
      }

      // Entering column in the current basis.
      std::fill(u.begin(), u.end(), 0.0);
      if (q < n_) {
        for (const auto& e : columns_[q]) {
          for (std::size_t i = 0; i < m_; ++i) u[i] += binv_[i * m_ + e.col] * e.value;
        }
      } else {
        for (std::size_t i = 0; i < m_; ++i) u[i] = -binv_[i * m_ + (q - n_)];
      }
      const double pivot = u[r];
      if (std::abs(pivot) < options_.pivot_tol) {
        // Basis inverse drifted; rebuild and retry.
        refactor();
        since_refactor = 0;
        ++result.iterations;
        continue;
      }

      const double theta = xb_[r] / pivot;
      for (std::size_t i = 0; i < m_; ++i) xb_[i] -= theta * u[i];
      xb_[r] = theta;

      const double t = d_[q] / pivot;
      for (std::size_t j = 0; j < total; ++j) {
        if (!is_basic_[j]) d_[j] -= t * alpha[j];
      }
      const std::size_t leaving = basis_[r];
      d_[q] = 0.0;
      d_[leaving] = -t;

      double* prow = &binv_[r * m_];
      for (std::size_t k = 0; k < m_; ++k) prow[k] /= pivot;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == r || u[i] == 0.0) continue;
        double* row = &binv_[i * m_];
        const double f = u[i];
        for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
      }
      basis_[r] = q;
      is_basic_[q] = true;
      is_basic_[leaving] = false;

      ++result.iterations;
      // A refactorization costs O(m^3), so it runs at most once per m pivots.
      if (++since_refactor >= std::max(options_.refactor_every, m_)) {
        refactor();
        since_refactor = 0;
      }
    }
    result.status = LpStatus::kOptimal;
    return finish(result);
  }

 private:
  LpResult& finish(LpResult& result) {
    result.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) result.x[basis_[i]] = std::max(0.0, xb_[i]);
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) result.objective += c_[j] * result.x[j];
    return result;
  }

  // Recomputes the basis inverse by Gauss-Jordan elimination, then the basic
  // values and reduced costs from scratch.
  void refactor() {
    std::vector<double> mat(m_ * m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const std::size_t j = basis_[k];
      if (j < n_) {
        for (const auto& e : columns_[j]) mat[e.col * m_ + k] = e.value;
      } else {
        mat[(j - n_) * m_ + k] = -1.0;
      }
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      for (std::size_t i = col + 1; i < m_; ++i) {
        if (std::abs(mat[i * m_ + col]) > std::abs(mat[piv * m_ + col])) piv = i;
      }
      if (std::abs(mat[piv * m_ + col]) < 1e-14) {
        throw InternalError("simplex basis became singular during refactorization");
      }
      if (piv != col) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(mat[piv * m_ + k], mat[col * m_ + k]);
          std::swap(inv[piv * m_ + k], inv[col * m_ + k]);
        }
      }
      const double p = mat[col * m_ + col];
      for (std::size_t k = 0; k < m_; ++k) {
        mat[col * m_ + k] /= p;
        inv[col * m_ + k] /= p;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == col) continue;
        const double f = mat[i * m_ + col];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          mat[i * m_ + k] -= f * mat[col * m_ + k];
          inv[i * m_ + k] -= f * inv[col * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < m_; ++k) v += binv_[i * m_ + k] * b_[k];
      xb_[i] = v;
    }
    std::vector<double> y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = basis_[i];
      const double cb = j < n_ ? c_[j] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * binv_[i * m_ + k];
    }
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (is_basic_[j]) {
        d_[j] = 0.0;
        continue;
      }
      if (j < n_) {
        double dot = 0.0;
        for (const auto& e : columns_[j]) dot += y[e.col] * e.value;
        d_[j] = c_[j] - dot;
      } else {
        d_[j] = y[j - n_];
      }
    }
  }

  std::size_t n_, m_;
  std::vector<double> b_;
  const std::vector<double>& c_;
  LpOptions options_;
  std::vector<std::vector<MatrixEntry>> columns_;  // MatrixEntry::col holds the row
  std::vector<std::size_t> basis_;
  std::vector<bool> is_basic_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  std::vector<double> d_;
};

}  // namespace

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

LpResult solve_covering_lp(const CoveringLp& lp, const LpOptions& options) {
  if (lp.rows.size() != lp.b.size() || lp.c.size() != lp.num_cols) {
    throw InternalError("covering LP dimensions are inconsistent");
  }
  for (double cj : lp.c) {
    if (cj < 0.0 || !std::isfinite(cj)) throw DataError("covering LP requires finite costs >= 0");
  }
  auto rows = lp.rows;
  auto b = lp.b;
  std::vector<bool> bounded(lp.num_cols, false);
  std::size_t total_iterations = 0;
  while (true) {
    DualSimplex simplex(lp.num_cols, rows, b, lp.c, options);
    LpResult result = simplex.run();
    total_iterations += result.iterations;
    result.iterations = total_iterations;
    if (result.status != LpStatus::kOptimal || lp.upper.empty()) return result;
    bool added = false;
    for (std::size_t j = 0; j < lp.num_cols; ++j) {
      if (!bounded[j] && result.x[j] > lp.upper[j] + options.feasibility_tol) {
        rows.push_back({{j, -1.0}});
        b.push_back(-lp.upper[j]);
        bounded[j] = true;
        added = true;
      }
    }
    if (!added) {
      for (std::size_t j = 0; j < lp.num_cols; ++j) {
        result.x[j] = std::min(result.x[j], lp.upper[j]);
      }
      return result;
    }
  }
}

}  // namespace mgram
