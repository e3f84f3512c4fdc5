#include "mgram/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "mgram/error.hpp"
#include "mgram/solvers.hpp"

namespace mgram {
namespace {

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(rng, i)]);
  }
}

std::size_t uniform_between(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + uniform_below(rng, hi - lo + 1);
}

// Records under construction with the intervals already holding a planted gram.
struct Canvas {
  std::string text;
  std::vector<std::pair<std::size_t, std::size_t>> used;  // [start, end), sorted

  bool free(std::size_t s, std::size_t e) const {
    for (const auto& [a, b] : used) {
      if (s < b && a < e) return false;
    }
    return true;
  }

  void place(const std::string& g, std::mt19937_64& rng) {
    const std::size_t len = g.size();
    std::size_t at = text.size();
    if (len <= text.size()) {
      const std::size_t slots = text.size() - len + 1;
      bool found = false;
      for (int attempt = 0; attempt < 8 && !found; ++attempt) {
        const std::size_t s = uniform_below(rng, slots);
        if (free(s, s + len)) {
          at = s;
          found = true;
        }
      }
      // Fall back to the first free slot, then to appending.
      for (std::size_t s = 0; s < slots && !found; ++s) {
        if (free(s, s + len)) {
          at = s;
          found = true;
        }
      }
    }
    if (at == text.size()) text.append(len, ' ');
    text.replace(at, len, g);
    used.emplace_back(at, at + len);
    std::sort(used.begin(), used.end());
  }
};

std::string escape_key(std::string_view key) {
  std::string out;
  for (char ch : key) {
    if (std::string_view("()[]|.{}\\").find(ch) != std::string_view::npos) out += '\\';
    out += ch;
  }
  return out;
}

using Assign = std::function<void(const std::string&)>;

void parse_config(std::istream& in, const std::map<std::string, Assign>& fields,
                  const char* what) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(std::string(what) + " line " + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw DataError(std::string(what) + " line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      it->second(value);
    } catch (const DataError&) {
      throw;
    } catch (const std::exception&) {
      throw DataError(std::string(what) + " line " + std::to_string(line_no) + ": bad value '" + value +
                      "' for " + key);
    }
  }
}

std::size_t to_size(const std::string& v) {
  std::size_t used = 0;
  const auto x = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return static_cast<std::size_t>(x);
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

void validate(const CorpusSpec& spec) {
  if (spec.alphabet.empty()) throw DataError("corpus spec: empty alphabet");
  if (spec.alphabet.find('\n') != std::string::npos) throw DataError("corpus spec: alphabet contains a newline");
  if (spec.record_count == 0) throw DataError("corpus spec: record_count must be at least 1");
  if (spec.min_record_len > spec.max_record_len) {
    throw DataError("corpus spec: min_record_len exceeds max_record_len");
  }
  if (spec.distribution == SupportDistribution::kNormal && !(spec.sd > 0.0)) {
    throw DataError("corpus spec: sd must be positive");
  }
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw InternalError("uniform_below needs n > 0");
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string expand_alphabet(const std::string& text) {
  if (text.size() == 3 && text[1] == '-' && text[0] <= text[2]) {
    std::string out;
    for (int c = static_cast<unsigned char>(text[0]); c <= static_cast<unsigned char>(text[2]); ++c) {
      out += static_cast<char>(c);
    }
    return out;
  }
  return text;
}

GeneratedCorpus gen_corpus_detailed(const CorpusSpec& spec) {
  validate(spec);
  std::string alphabet = spec.alphabet;
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  std::mt19937_64 rng(spec.seed);

  std::vector<Canvas> canvas(spec.record_count);
  for (auto& c : canvas) {
    const std::size_t len = uniform_between(rng, spec.min_record_len, spec.max_record_len);
    c.text.resize(len);
    for (auto& ch : c.text) ch = alphabet[uniform_below(rng, alphabet.size())];
  }

  GeneratedCorpus out;
  if (spec.distribution == SupportDistribution::kNormal) {
    std::vector<std::size_t> supports(spec.gram_count);
    for (std::size_t k = 0; k < supports.size(); ++k) {
      const double draw = std::abs(spec.mean + spec.sd * standard_normal(rng));
      const auto s = static_cast<std::size_t>(std::max(1.0, std::ceil(draw)));
      if (s > spec.record_count) {
        throw DataError("support draw " + std::to_string(k) + " is " + std::to_string(s) +
                        ", more than the " + std::to_string(spec.record_count) + " records");
      }
      supports[k] = s;
    }
    std::sort(supports.begin(), supports.end());
    std::deque<std::size_t> pending(supports.begin(), supports.end());

    std::vector<std::string> expand{""};
    std::vector<RecordId> ids(spec.record_count);
    while (!pending.empty() && !expand.empty()) {
      std::vector<std::string> children;
      for (const auto& g : expand) {
        for (char a : alphabet) children.push_back(g + a);
      }
      expand.clear();
      shuffle(children, rng);
      std::size_t next_child = 0;
      while (!pending.empty() && next_child < children.size()) {
        std::string g = std::move(children[next_child++]);
        if (unit_uniform(rng) < 0.5) {
          const std::size_t s = pending.front();
          pending.pop_front();
          // Partial Fisher-Yates: s distinct records.
          for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<RecordId>(i);
          for (std::size_t i = 0; i < s; ++i) {
            std::swap(ids[i], ids[i + uniform_below(rng, ids.size() - i)]);
            canvas[ids[i]].place(g, rng);
          }
          out.planted.push_back({std::move(g), s});
        } else {
          expand.push_back(std::move(g));
        }
      }
    }
  }

  std::vector<std::string> records;
  records.reserve(canvas.size());
  for (auto& c : canvas) records.push_back(std::move(c.text));
  out.corpus = Corpus(std::move(records), alphabet);
  return out;
}

Corpus gen_corpus(const CorpusSpec& spec) { return gen_corpus_detailed(spec).corpus; }

GeneratedWorkload gen_workload(const Corpus& corpus, const WorkloadSpec& spec) {
  if (spec.key_count == 0) throw DataError("workload spec: key_count must be at least 1");
  if (spec.min_key_len == 0 || spec.min_key_len > spec.max_key_len) {
    throw DataError("workload spec: key lengths must satisfy 1 <= min <= max");
  }
  if (!(spec.sample_fraction >= 0.0 && spec.sample_fraction <= 1.0)) {
    throw DataError("workload spec: sample_fraction must lie in [0, 1]");
  }
  std::mt19937_64 rng(spec.seed);
  GeneratedWorkload out;
  for (std::size_t r = 0; r < corpus.size(); ++r) {
    if (spec.max_queries != 0 && out.lines.size() >= spec.max_queries) break;
    if (!(unit_uniform(rng) < spec.sample_fraction)) continue;
    const std::string& text = corpus.record(static_cast<RecordId>(r));
    std::vector<std::size_t> lens(spec.key_count), gaps(spec.key_count - 1);
    std::size_t total = 0;
    for (auto& l : lens) total += l = uniform_between(rng, spec.min_key_len, spec.max_key_len);
    for (auto& g : gaps) total += g = uniform_between(rng, 0, spec.max_gap);
    // Shrink gaps, then keys, until the cut fits the record.
    for (auto& g : gaps) {
      if (total <= text.size()) break;
      const std::size_t cut = std::min(g, total - text.size());
      g -= cut;
      total -= cut;
    }
    for (auto& l : lens) {
      if (total <= text.size()) break;
      const std::size_t cut = std::min(l - spec.min_key_len, total - text.size());
      l -= cut;
      total -= cut;
    }
    if (total > text.size()) {
      ++out.skipped;
      continue;
    }
    std::size_t pos = uniform_between(rng, 0, text.size() - total);
    std::string line;
    for (std::size_t k = 0; k < spec.key_count; ++k) {
      if (k > 0) {
        const std::size_t hi = 10 * ((gaps[k - 1] + 1 + 9) / 10) - 1;
        line += ".{0," + std::to_string(hi) + "}";
        pos += gaps[k - 1];
      }
      line += "(" + escape_key(std::string_view(text).substr(pos, lens[k])) + ")";
      pos += lens[k];
    }
    out.queries.push_back(parse_query(line));
    out.lines.push_back(std::move(line));
    out.sources.push_back(static_cast<RecordId>(r));
  }
  return out;
}

CorpusSpec parse_corpus_spec(std::istream& in) {
  CorpusSpec spec;
  std::map<std::string, Assign> fields{
      {"alphabet", [&](const std::string& v) { spec.alphabet = expand_alphabet(v); }},
      {"records", [&](const std::string& v) { spec.record_count = to_size(v); }},
      {"min_len", [&](const std::string& v) { spec.min_record_len = to_size(v); }},
      {"max_len", [&](const std::string& v) { spec.max_record_len = to_size(v); }},
      {"distribution",
       [&](const std::string& v) {
         if (v == "none") spec.distribution = SupportDistribution::kNone;
         else if (v == "normal") spec.distribution = SupportDistribution::kNormal;
         else throw DataError("corpus spec: distribution must be none or normal");
       }},
      {"mean", [&](const std::string& v) { spec.mean = to_double(v); }},
      {"sd", [&](const std::string& v) { spec.sd = to_double(v); }},
      {"grams", [&](const std::string& v) { spec.gram_count = to_size(v); }},
      {"seed", [&](const std::string& v) { spec.seed = to_size(v); }},
  };
  parse_config(in, fields, "corpus spec");
  validate(spec);
  return spec;
}

WorkloadSpec parse_workload_spec(std::istream& in) {
  WorkloadSpec spec;
  std::map<std::string, Assign> fields{
      {"keys", [&](const std::string& v) { spec.key_count = to_size(v); }},
      {"min_key_len", [&](const std::string& v) { spec.min_key_len = to_size(v); }},
      {"max_key_len", [&](const std::string& v) { spec.max_key_len = to_size(v); }},
      {"max_gap", [&](const std::string& v) { spec.max_gap = to_size(v); }},
      {"sample_fraction", [&](const std::string& v) { spec.sample_fraction = to_double(v); }},
      {"max_queries", [&](const std::string& v) { spec.max_queries = to_size(v); }},
      {"seed", [&](const std::string& v) { spec.seed = to_size(v); }},
  };
  parse_config(in, fields, "workload spec");
  return spec;
}

CorpusSpec load_corpus_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_corpus_spec(in);
}

WorkloadSpec load_workload_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_workload_spec(in);
}

}  // namespace mgram
