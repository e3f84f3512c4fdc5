#include <fstream>
#include <optional>

#include "mgram/query.hpp"

namespace mgram {
namespace {

struct Repeat {
  std::size_t lo;
  std::size_t hi;
};

class PrositeReader {
 public:
  explicit PrositeReader(std::string_view text) : text_(text) {}

  RegexQuery read() {
    std::vector<Element> elements;
    std::vector<CharSet> run;
    std::optional<Gap> gap;
    bool first = true;
    while (true) {
      if (at_end()) fail("unexpected end of pattern");
      const char c = text_[pos_];
      if (c == '<' || c == '>') unsupported(std::string("anchor '") + c + "'");
      if (c == '{') unsupported("exclusion {...}");
      if (c == 'x' || c == 'X') {
        ++pos_;
        const Repeat r = read_repeat().value_or(Repeat{1, 1});
        if (first) unsupported("leading wildcard");
        if (!run.empty()) {
          elements.push_back(Element{Key(std::move(run))});
          run.clear();
        }
        if (gap) {
          gap->lo += r.lo;
          gap->hi += r.hi;
        } else {
          gap = Gap{r.lo, r.hi};
        }
      } else {
        CharSet set;
        bool is_class = false;
        if (c == '[') {
          set = read_class();
          is_class = true;
        } else if (c >= 'A' && c <= 'Z') {
          set.set(static_cast<unsigned char>(c));
          ++pos_;
        } else {
          fail(std::string("unexpected '") + c + "'");
        }
        std::size_t copies = 1;
        if (const auto r = read_repeat()) {
          if (is_class) unsupported("repetition on a class");
          if (r->lo != r->hi) unsupported("ranged repetition on a residue");
          copies = r->lo;
          if (copies == 0) fail("zero repetition");
        }
        if (gap) {
          elements.push_back(Element{*gap});
          gap.reset();
        }
        for (std::size_t i = 0; i < copies; ++i) run.push_back(set);
      }
      first = false;
      if (at_end()) break;
      if (text_[pos_] == '-') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == '>' || text_[pos_] == '<') {
        unsupported(std::string("anchor '") + text_[pos_] + "'");
      }
      fail("expected '-'");
    }
    if (gap) unsupported("trailing wildcard");
    if (!run.empty()) elements.push_back(Element{Key(std::move(run))});

    RegexQuery q;
    for (const auto& e : elements) {
      if (const auto* k = std::get_if<Key>(&e.node)) {
        q.source_text += "(" + k->to_string() + ")";
      } else {
        const auto& g = std::get<Gap>(e.node);
        q.source_text += ".{" + std::to_string(g.lo) + "," + std::to_string(g.hi) + "}";
      }
    }
    q.elements = std::move(elements);
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedConstruct(what);
  }

  bool at_end() const { return pos_ >= text_.size(); }

  std::size_t read_number() {
    if (at_end() || text_[pos_] < '0' || text_[pos_] > '9') fail("expected a number");
    std::size_t v = 0;
    while (!at_end() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      v = v * 10 + static_cast<std::size_t>(text_[pos_] - '0');
      if (v > 1'000'000) fail("repetition count out of range");
      ++pos_;
    }
    return v;
  }

  std::optional<Repeat> read_repeat() {
    if (at_end() || text_[pos_] != '(') return std::nullopt;
    ++pos_;
    Repeat r;
    r.lo = read_number();
    r.hi = r.lo;
    if (!at_end() && text_[pos_] == ',') {
      ++pos_;
      r.hi = read_number();
    }
    if (at_end() || text_[pos_] != ')') fail("expected ')'");
    ++pos_;
    if (r.lo > r.hi) fail("repetition lower bound exceeds upper bound");
    return r;
  }

  CharSet read_class() {
    ++pos_;  // '['
    CharSet set;
    while (!at_end() && text_[pos_] != ']') {
      const char c = text_[pos_];
      if (c == '<' || c == '>') unsupported(std::string("anchor '") + c + "' inside a class");
      if (c < 'A' || c > 'Z') fail(std::string("unexpected '") + c + "' in class");
      set.set(static_cast<unsigned char>(c));
      ++pos_;
    }
    if (at_end()) fail("unterminated class");
    ++pos_;
    if (set.none()) fail("empty class");
    return set;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string strip(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') out.push_back(c);
  }
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

}  // namespace

RegexQuery prosite_to_query(std::string_view pattern) {
  const std::string cleaned = strip(pattern);
  if (cleaned.empty()) throw ParseError("empty PROSITE pattern", 0);
  return PrositeReader(cleaned).read();
}

std::vector<PrositeEntry> load_prosite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open PROSITE file " + path.string());
  std::vector<PrositeEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string text = strip(line);
    if (text.empty() || text.front() == '#') continue;
    PrositeEntry e;
    if (const auto semi = line.find(';'); semi != std::string::npos) {
      e.id = strip(line.substr(0, semi));
      e.pattern = strip(line.substr(semi + 1));
    } else {
      e.id = "P" + std::to_string(out.size());
      e.pattern = text;
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace mgram
