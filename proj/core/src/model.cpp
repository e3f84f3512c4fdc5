#include "mgram/model.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "mgram/error.hpp"

namespace mgram {
namespace {

struct Anchor {
  std::size_t key = 0;
  std::size_t start = 0;
  std::size_t len = 0;
  std::size_t count = 0;
};

std::vector<std::string> literal_grams(const SubQuery& sq, std::size_t min_len) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const Key& key : sq.keys) {
    const std::size_t n = key.length();
    for (std::size_t len = min_len; len <= n; ++len) {
      for (std::size_t s = 0; s + len <= n; ++s) {
        if (!key.is_literal(s, s + len)) continue;
        std::string g;
        for (std::size_t i = s; i < s + len; ++i) {
          for (unsigned c = 0; c < 256; ++c) {
            if (key.at(i).test(c)) g.push_back(static_cast<char>(c));
          }
        }
        if (seen.insert(g).second) out.push_back(std::move(g));
      }
    }
  }
  return out;
}

std::optional<Anchor> choose_anchor(const SubQuery& sq, const GramOptions& options) {
  std::optional<Anchor> best;
  for (std::size_t k = 0; k < sq.keys.size(); ++k) {
    const Key& key = sq.keys[k];
    const std::size_t top = std::min(key.length(), options.class_window);
    for (std::size_t len = options.min_len; len <= top; ++len) {
      for (std::size_t s = 0; s + len <= key.length(); ++s) {
        if (key.is_literal(s, s + len)) continue;
        const std::size_t n = key.instantiation_count(s, s + len, options.instantiation_cap);
        if (n > options.instantiation_cap) continue;
        const bool better = !best || n < best->count ||
                            (n == best->count && len > best->len);
        if (better) best = Anchor{k, s, len, n};
      }
    }
  }
  return best;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void finish_stats(SelectionProblem& p) {
  p.m_star = 0;
  for (const auto& r : p.rows) p.m_star = std::max(p.m_star, r.size());
  p.coverage.assign(p.num_cols(), 0);
  for (const auto& r : p.rows) {
    for (const auto& e : r) ++p.coverage[e.col];
  }
  p.s_min = 0;
  p.s_max = 0;
  for (std::size_t s : p.supports) {
    if (s == 0) continue;
    p.s_min = p.s_min == 0 ? s : std::min(p.s_min, s);
    p.s_max = std::max(p.s_max, s);
  }
}

std::string expect_section(std::istream& in, const std::string& name, std::size_t& count) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("model dump: missing " + name + " section");
  std::istringstream ls(line);
  std::string tag;
  ls >> tag >> count;
  if (tag != name || !ls) throw DataError("model dump: expected '" + name + " <n>', got '" + line + "'");
  return line;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DataError("model dump: malformed number '" + s + "'");
  }
  if (used != s.size()) throw DataError("model dump: malformed number '" + s + "'");
  return v;
}

}  // namespace

std::vector<ConstraintRow> constraint_rows(std::span<const SubQuery> subqueries,
                                           const GramOptions& options) {
  std::vector<ConstraintRow> rows;
  for (std::size_t i = 0; i < subqueries.size(); ++i) {
    const SubQuery& sq = subqueries[i];
    if (sq.is_literal()) {
      rows.push_back({i, key_grams(sq, options).m_bar_q});
      continue;
    }
    const auto literal = literal_grams(sq, options.min_len);
    const auto anchor = choose_anchor(sq, options);
    if (!anchor) {
      rows.push_back({i, literal});
      continue;
    }
    const Key& key = sq.keys[anchor->key];
    const auto instantiations = key.instantiations(anchor->start, anchor->start + anchor->len,
                                                   options.instantiation_cap);
    for (const auto& x : *instantiations) {
      ConstraintRow row{i, literal};
      std::unordered_set<std::string> seen(literal.begin(), literal.end());
      for (std::size_t len = options.min_len; len <= x.size(); ++len) {
        for (std::size_t s = 0; s + len <= x.size(); ++s) {
          std::string g = x.substr(s, len);
          if (seen.insert(g).second) row.grams.push_back(std::move(g));
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

SelectionProblem build_problem(std::span<const ConstraintRow> rows,
                               const std::unordered_map<std::string, std::size_t>& supports) {
  SelectionProblem p;
  std::unordered_map<std::string, std::size_t> column;
  auto support_of = [&](const std::string& g) -> std::size_t {
    auto it = supports.find(g);
    return it == supports.end() ? 0 : it->second;
  };

  std::vector<std::size_t> dropped;
  for (const auto& row : rows) {
    std::vector<MatrixEntry> entries;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& g : row.grams) {
      const std::size_t s = support_of(g);
      if (s == 0) continue;
      auto [it, inserted] = column.try_emplace(g, p.grams.size());
      if (inserted) {
        p.grams.push_back(g);
        p.supports.push_back(s);
      }
      entries.push_back({it->second, static_cast<double>(s)});
      b = std::min(b, static_cast<double>(s));
    }
    if (entries.empty()) {
      dropped.push_back(row.subquery);
      continue;
    }
    std::sort(entries.begin(), entries.end(),
              [](const MatrixEntry& a, const MatrixEntry& e) { return a.col < e.col; });
    entries.erase(std::unique(entries.begin(), entries.end(),
                              [](const MatrixEntry& a, const MatrixEntry& e) {
                                return a.col == e.col;
                              }),
                  entries.end());
    p.rows.push_back(std::move(entries));
    p.b.push_back(b);
    p.row_subquery.push_back(row.subquery);
  }
  std::sort(dropped.begin(), dropped.end());
  dropped.erase(std::unique(dropped.begin(), dropped.end()), dropped.end());
  // A sub-query is only dropped when none of its rows survived.
  for (std::size_t sq : dropped) {
    if (std::find(p.row_subquery.begin(), p.row_subquery.end(), sq) == p.row_subquery.end()) {
      p.dropped_subqueries.push_back(sq);
    }
  }
  if (p.grams.empty()) {
    throw DataError("empty model: no query gram occurs in the corpus");
  }

  finish_stats(p);
  p.c.resize(p.num_cols());
  for (std::size_t j = 0; j < p.num_cols(); ++j) {
    p.c[j] = static_cast<double>(p.supports[j]) /
             (static_cast<double>(p.grams[j].size()) * static_cast<double>(p.coverage[j]));
  }
  return p;
}

SelectionProblem build_problem(const Corpus& corpus, std::span<const SubQuery> subqueries,
                               const GramOptions& options) {
  if (subqueries.empty()) throw DataError("empty workload");
  const auto rows = constraint_rows(subqueries, options);
  std::vector<std::string> all;
  for (const auto& r : rows) all.insert(all.end(), r.grams.begin(), r.grams.end());
  return build_problem(rows, count_supports(corpus, all));
}

double objective(const SelectionProblem& p, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t j = 0; j < p.num_cols(); ++j) total += p.c[j] * x[j];
  return total;
}

std::vector<double> row_slack(const SelectionProblem& p, std::span<const double> x) {
  std::vector<double> slack(p.num_rows());
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    double activity = 0.0;
    for (const auto& e : p.rows[i]) activity += e.value * x[e.col];
    slack[i] = activity - p.b[i];
  }
  return slack;
}

void write_dump(const SelectionProblem& p, std::ostream& out) {
  std::size_t nnz = 0;
  for (const auto& r : p.rows) nnz += r.size();
  out << "MGMODEL v1\n";
  out << "GRAMS " << p.num_cols() << '\n';
  for (const auto& g : p.grams) out << g << '\n';
  out << "SUPPORTS " << p.num_cols() << '\n';
  for (std::size_t s : p.supports) out << s << '\n';
  out << "ROWS " << p.num_rows() << ' ' << nnz << '\n';
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    for (const auto& e : p.rows[i]) out << i << ' ' << e.col << ' ' << fixed6(e.value) << '\n';
  }
  out << "B " << p.num_rows() << '\n';
  for (double v : p.b) out << fixed6(v) << '\n';
  out << "C " << p.num_cols() << '\n';
  for (double v : p.c) out << fixed6(v) << '\n';
  out << "END\n";
}

std::string dump_string(const SelectionProblem& p) {
  std::ostringstream out;
  write_dump(p, out);
  return out.str();
}

SelectionProblem read_dump(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "MGMODEL v1") {
    throw DataError("model dump: missing 'MGMODEL v1' header");
  }
  SelectionProblem p;
  std::size_t n = 0;
  expect_section(in, "GRAMS", n);
  p.grams.resize(n);
  for (auto& g : p.grams) {
    if (!std::getline(in, g)) throw DataError("model dump: truncated GRAMS");
  }
  std::size_t n2 = 0;
  expect_section(in, "SUPPORTS", n2);
  if (n2 != n) throw DataError("model dump: SUPPORTS count differs from GRAMS");
  p.supports.resize(n);
  for (auto& s : p.supports) {
    if (!std::getline(in, line)) throw DataError("model dump: truncated SUPPORTS");
    s = static_cast<std::size_t>(parse_real(line));
  }
  std::size_t m = 0;
  if (!std::getline(in, line)) throw DataError("model dump: missing ROWS section");
  std::size_t nnz = 0;
  {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag >> m >> nnz;
    if (tag != "ROWS" || !ls) throw DataError("model dump: malformed ROWS header");
  }
  p.rows.resize(m);
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!std::getline(in, line)) throw DataError("model dump: truncated ROWS");
    std::istringstream ls(line);
    std::size_t i = 0, j = 0;
    std::string v;
    ls >> i >> j >> v;
    if (!ls || i >= m || j >= n) throw DataError("model dump: bad triplet '" + line + "'");
    p.rows[i].push_back({j, parse_real(v)});
  }
  for (auto& r : p.rows) {
    std::sort(r.begin(), r.end(),
              [](const MatrixEntry& a, const MatrixEntry& e) { return a.col < e.col; });
  }
  std::size_t mb = 0;
  expect_section(in, "B", mb);
  if (mb != m) throw DataError("model dump: B length differs from row count");
  p.b.resize(m);
  for (auto& v : p.b) {
    if (!std::getline(in, line)) throw DataError("model dump: truncated B");
    v = parse_real(line);
  }
  std::size_t nc = 0;
  expect_section(in, "C", nc);
  if (nc != n) throw DataError("model dump: C length differs from column count");
  p.c.resize(n);
  for (auto& v : p.c) {
    if (!std::getline(in, line)) throw DataError("model dump: truncated C");
    v = parse_real(line);
  }
  if (!std::getline(in, line) || line != "END") throw DataError("model dump: missing END");
  p.row_subquery.resize(m);
  for (std::size_t i = 0; i < m; ++i) p.row_subquery[i] = i;
  finish_stats(p);
  return p;
}

}  // namespace mgram
