#pragma once

// Deliberately naive reference implementations. None of them call into the
// library beyond plain data types, so agreement with the library is evidence
// rather than tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mgram/model.hpp"
#include "mgram/query.hpp"

namespace oracle {

inline std::size_t support(const std::vector<std::string>& records, const std::string& g) {
  std::size_t n = 0;
  for (const auto& r : records) n += r.find(g) != std::string::npos;
  return n;
}

inline std::vector<std::uint32_t> containing(const std::vector<std::string>& records,
                                             const std::string& g) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < records.size(); ++i) {
    if (records[i].find(g) != std::string::npos) out.push_back(i);
  }
  return out;
}

inline bool key_at(const mgram::Key& key, const std::string& text, std::size_t pos) {
  if (pos + key.length() > text.size()) return false;
  for (std::size_t i = 0; i < key.length(); ++i) {
    if (!key.at(i).test(static_cast<unsigned char>(text[pos + i]))) return false;
  }
  return true;
}

// Backtracking over every placement of every key.
inline bool place(const mgram::SubQuery& sq, const std::string& text, std::size_t k,
                  std::size_t pos) {
  if (!key_at(sq.keys[k], text, pos)) return false;
  if (k + 1 == sq.keys.size()) return true;
  const std::size_t end = pos + sq.keys[k].length();
  for (std::size_t gap = sq.gaps[k].lo; gap <= sq.gaps[k].hi; ++gap) {
    if (end + gap > text.size()) break;
    if (place(sq, text, k + 1, end + gap)) return true;
  }
  return false;
}

inline bool matches(const mgram::SubQuery& sq, const std::string& text) {
  if (sq.keys.empty()) return true;
  for (std::size_t pos = 0; pos <= text.size(); ++pos) {
    if (place(sq, text, 0, pos)) return true;
  }
  return false;
}

inline bool prefix_free(const std::vector<std::string>& grams) {
  for (const auto& a : grams) {
    for (const auto& b : grams) {
      if (a.size() < b.size() && b.compare(0, a.size(), a) == 0) return false;
    }
  }
  return true;
}

// All substrings of length >= min_len of a literal string, deduplicated.
inline std::set<std::string> substrings(const std::string& s, std::size_t min_len) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t len = min_len; i + len <= s.size(); ++len) out.insert(s.substr(i, len));
  }
  return out;
}

inline bool feasible(const mgram::SelectionProblem& p, const std::vector<int>& x) {
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    double lhs = 0.0;
    for (const auto& e : p.rows[i]) lhs += e.value * x[e.col];
    if (lhs < p.b[i] - 1e-9) return false;
  }
  return true;
}

// Minimum cost over all 2^n binary vectors; nullopt when nothing is feasible.
inline std::optional<double> enumerate_min(const mgram::SelectionProblem& p) {
  const std::size_t n = p.grams.size();
  std::optional<double> best;
  std::vector<int> x(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = (mask >> j) & 1;
      cost += x[j] * p.c[j];
    }
    if (feasible(p, x) && (!best || cost < *best)) best = cost;
  }
  return best;
}

// Two-phase tableau simplex with Bland's rule for
//   min c'x  s.t.  A x >= b,  0 <= x <= 1.
// Standard form: A x - s = b and x + t = 1 with artificials on every row.
inline std::optional<double> lp_min(const mgram::SelectionProblem& p) {
  const std::size_t n = p.grams.size(), m = p.rows.size();
  const std::size_t rows = m + n;
  // Columns: x (n), s (m), t (n), artificial (rows), rhs.
  const std::size_t cols = n + m + n + rows;
  std::vector<std::vector<double>> T(rows, std::vector<double>(cols + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& e : p.rows[i]) T[i][e.col] = e.value;
    T[i][n + i] = -1.0;
    T[i][cols] = p.b[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    T[m + j][j] = 1.0;
    T[m + j][n + m + j] = 1.0;
    T[m + j][cols] = 1.0;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (T[i][cols] < 0) {
      for (auto& v : T[i]) v = -v;
    }
    T[i][n + m + n + i] = 1.0;
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = n + m + n + i;

  auto optimize = [&](const std::vector<double>& cost, std::size_t allowed) {
    for (int guard = 0; guard < 100000; ++guard) {
      // Reduced costs.
      std::size_t enter = cols;
      for (std::size_t j = 0; j < allowed; ++j) {
        double d = cost[j];
        for (std::size_t i = 0; i < rows; ++i) d -= cost[basis[i]] * T[i][j];
        if (d < -1e-10) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return true;
      std::size_t leave = rows;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows; ++i) {
        if (T[i][enter] > 1e-12) {
          const double ratio = T[i][cols] / T[i][enter];
          if (ratio < best - 1e-12 ||
              (ratio <= best + 1e-12 && leave < rows && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == rows) return false;  // unbounded
      const double piv = T[leave][enter];
      for (auto& v : T[leave]) v /= piv;
      for (std::size_t i = 0; i < rows; ++i) {
        if (i == leave || T[i][enter] == 0.0) continue;
        const double f = T[i][enter];
        for (std::size_t k = 0; k <= cols; ++k) T[i][k] -= f * T[leave][k];
      }
      basis[leave] = enter;
    }
    return false;
  };

  std::vector<double> phase1(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) phase1[n + m + n + i] = 1.0;
  optimize(phase1, cols);
  double infeasibility = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] >= n + m + n) infeasibility += T[i][cols];
  }
  if (infeasibility > 1e-7) return std::nullopt;

  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = p.c[j];
  // Artificials are barred from re-entering; any still basic sit at zero.
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] >= n + m + n) phase2[basis[i]] = 0.0;
  }
  if (!optimize(phase2, n + m + n)) return std::nullopt;
  double value = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] < n) value += p.c[basis[i]] * T[i][cols];
  }
  return value;
}

// Random covering instance: every row has at least one column.
inline mgram::SelectionProblem random_problem(std::mt19937_64& rng, std::size_t cols,
                                              std::size_t rows, std::size_t max_support) {
  mgram::SelectionProblem p;
  std::uniform_int_distribution<std::size_t> sup(1, max_support);
  std::uniform_int_distribution<std::size_t> len(2, 5);
  for (std::size_t j = 0; j < cols; ++j) {
    p.grams.push_back("g" + std::to_string(j));
    p.supports.push_back(sup(rng));
  }
  std::bernoulli_distribution pick(0.35);
  std::uniform_int_distribution<std::size_t> any(0, cols - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<mgram::MatrixEntry> row;
    for (std::size_t j = 0; j < cols; ++j) {
      if (pick(rng)) row.push_back({j, static_cast<double>(p.supports[j])});
    }
    if (row.empty()) {
      const std::size_t j = any(rng);
      row.push_back({j, static_cast<double>(p.supports[j])});
    }
    double b = std::numeric_limits<double>::infinity();
    for (const auto& e : row) b = std::min(b, e.value);
    p.rows.push_back(std::move(row));
    p.b.push_back(b);
    p.row_subquery.push_back(i);
  }
  p.coverage.assign(cols, 0);
  for (const auto& r : p.rows) {
    for (const auto& e : r) ++p.coverage[e.col];
    p.m_star = std::max(p.m_star, r.size());
  }
  p.s_min = *std::min_element(p.supports.begin(), p.supports.end());
  p.s_max = *std::max_element(p.supports.begin(), p.supports.end());
  for (std::size_t j = 0; j < cols; ++j) {
    const double cov = std::max<std::size_t>(1, p.coverage[j]);
    p.c.push_back(static_cast<double>(p.supports[j]) / (static_cast<double>(len(rng)) * cov));
  }
  return p;
}

}  // namespace oracle
