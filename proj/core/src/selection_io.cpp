#include <fstream>
#include <sstream>

#include "mgram/error.hpp"
#include "mgram/lpms.hpp"

namespace mgram {
namespace {

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string("selection file: missing ") + what);
  return line;
}

// Reads "<name> <value>".
std::string field(std::istream& in, const std::string& name) {
  const std::string line = next_line(in, name.c_str());
  if (line.compare(0, name.size() + 1, name + " ") != 0) {
    throw DataError("selection file: expected '" + name + "', found '" + line + "'");
  }
  return line.substr(name.size() + 1);
}

std::size_t to_size(const std::string& text, const std::string& name) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw DataError("selection file: bad value for " + name + ": '" + text + "'");
  }
}

}  // namespace

std::string to_string(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kIpms: return "ipms";
    case SelectionMode::kLpmsD: return "lpms-d";
    case SelectionMode::kLpmsR: return "lpms-r";
    case SelectionMode::kFree: return "free";
    case SelectionMode::kBest: return "best";
  }
  return "unknown";
}

SelectionMode parse_mode(std::string_view text) {
  for (auto m : {SelectionMode::kIpms, SelectionMode::kLpmsD, SelectionMode::kLpmsR,
                 SelectionMode::kFree, SelectionMode::kBest}) {
    if (text == to_string(m)) return m;
  }
  throw DataError("unknown selection mode '" + std::string(text) + "'");
}

bool is_prefix_free_mode(SelectionMode mode) { return mode != SelectionMode::kBest; }

std::string to_string(BenefitModel model) {
  return model == BenefitModel::kPruned ? "pruned" : "matched";
}

BenefitModel parse_benefit(std::string_view text) {
  if (text == "pruned") return BenefitModel::kPruned;
  if (text == "matched") return BenefitModel::kMatched;
  throw DataError("unknown benefit model '" + std::string(text) + "'");
}

void write_selection(const GramSelection& sel, std::ostream& out) {
  const SelectionParams& p = sel.params;
  out << "MGSEL v1\n";
  out << "mode " << to_string(sel.mode) << '\n';
  out << "min_len " << p.min_len << '\n';
  out << "seed " << p.seed << '\n';
  out << "class_window " << p.class_window << '\n';
  out << "instantiation_cap " << p.instantiation_cap << '\n';
  std::ostringstream sel_text;
  sel_text << p.selectivity;
  out << "selectivity " << sel_text.str() << '\n';
  out << "top_k " << p.top_k << '\n';
  out << "benefit " << to_string(p.benefit) << '\n';
  out << "node_limit " << p.node_limit << '\n';
  out << "corpus " << fingerprint_hex(sel.corpus_fingerprint) << '\n';
  out << "rows " << sel.rows_total << ' ' << sel.rows_satisfied << '\n';
  out << "grams " << sel.grams.size() << '\n';
  for (const auto& g : sel.grams) out << g.gram << '\t' << g.support << '\n';
}

GramSelection read_selection(std::istream& in) {
  if (next_line(in, "header") != "MGSEL v1") throw DataError("selection file: bad header");
  GramSelection sel;
  SelectionParams& p = sel.params;
  sel.mode = parse_mode(field(in, "mode"));
  p.min_len = to_size(field(in, "min_len"), "min_len");
  p.seed = to_size(field(in, "seed"), "seed");
  p.class_window = to_size(field(in, "class_window"), "class_window");
  p.instantiation_cap = to_size(field(in, "instantiation_cap"), "instantiation_cap");
  const std::string s = field(in, "selectivity");
  try {
    p.selectivity = std::stod(s);
  } catch (const std::exception&) {
    throw DataError("selection file: bad selectivity '" + s + "'");
  }
  p.top_k = to_size(field(in, "top_k"), "top_k");
  p.benefit = parse_benefit(field(in, "benefit"));
  p.node_limit = to_size(field(in, "node_limit"), "node_limit");
  sel.corpus_fingerprint = parse_fingerprint_hex(field(in, "corpus"));
  std::istringstream rows(field(in, "rows"));
  if (!(rows >> sel.rows_total >> sel.rows_satisfied)) throw DataError("selection file: bad rows line");
  const std::size_t n = to_size(field(in, "grams"), "grams");
  sel.grams.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string line = next_line(in, "gram line");
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError("selection file: malformed gram line " + std::to_string(i + 1));
    }
    sel.grams.push_back({line.substr(0, tab), to_size(line.substr(tab + 1), "support")});
  }
  return sel;
}

void save_selection(const GramSelection& sel, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_selection(sel, out);
  if (!out) throw IoError("write failed for " + path.string());
}

GramSelection load_selection(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_selection(in);
}

}  // namespace mgram
