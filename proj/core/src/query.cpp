#include "mgram/query.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace mgram {
namespace {

constexpr std::string_view kMetaChars = "()[]|.{}\\";

bool is_meta(char c) { return kMetaChars.find(c) != std::string_view::npos; }

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return b > std::numeric_limits<std::size_t>::max() - a
             ? std::numeric_limits<std::size_t>::max()
             : a + b;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<Element> parse() {
    auto elements = parse_sequence(/*nested=*/false);
    if (pos_ != text_.size()) fail("unexpected ')'");
    if (elements.empty()) fail("empty query");
    return elements;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, pos_);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void expect(char c) {
    if (peek() != c) {
      if (at_end()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "', found '" + peek() + "'");
    }
    ++pos_;
  }

  std::vector<Element> parse_sequence(bool nested) {
    std::vector<Element> out;
    while (!at_end() && !(nested && peek() == ')')) {
      if (peek() == '.') {
        out.push_back(Element{parse_gap()});
      } else if (peek() == '(') {
        std::vector<std::vector<Element>> branches;
        branches.push_back(parse_group());
        while (peek() == '|') {
          ++pos_;
          if (peek() != '(') fail("alternation branches must be parenthesized");
          branches.push_back(parse_group());
        }
        if (branches.size() == 1) {
          for (auto& e : branches.front()) out.push_back(std::move(e));
        } else {
          out.push_back(Element{Alternation{std::move(branches)}});
        }
      } else if (peek() == ')') {
        fail("unbalanced ')'");
      } else {
        fail(std::string("expected '(' or '.', found '") + peek() + "'");
      }
    }
    return out;
  }

  std::vector<Element> parse_group() {
    expect('(');
    std::vector<Element> inner;
    if (peek() == '(' || peek() == '.') {
      inner = parse_sequence(/*nested=*/true);
    } else {
      // "(pr|re)" is shorthand for "(pr)|(re)".
      std::vector<std::vector<Element>> branches;
      branches.push_back({Element{parse_key()}});
      while (peek() == '|') {
        ++pos_;
        branches.push_back({Element{parse_key()}});
      }
      if (branches.size() == 1) {
        inner = std::move(branches.front());
      } else {
        inner.push_back(Element{Alternation{std::move(branches)}});
      }
    }
    if (inner.empty()) fail("empty group");
    expect(')');
    return inner;
  }

  std::size_t parse_number() {
    if (at_end() || peek() < '0' || peek() > '9') fail("expected a number");
    std::size_t v = 0;
    while (!at_end() && peek() >= '0' && peek() <= '9') {
      const std::size_t digit = static_cast<std::size_t>(peek() - '0');
      if (v > (std::numeric_limits<std::size_t>::max() - digit) / 10) {
        fail("number out of range");
      }
      v = v * 10 + digit;
      ++pos_;
    }
    return v;
  }

  Gap parse_gap() {
    expect('.');
    if (peek() != '{') return Gap{1, 1};
    const std::size_t open = pos_;
    ++pos_;
    Gap g;
    g.lo = parse_number();
    g.hi = g.lo;
    if (peek() == ',') {
      ++pos_;
      g.hi = parse_number();
    }
    expect('}');
    if (g.lo > g.hi) throw ParseError("gap lower bound exceeds upper bound", open);
    return g;
  }

  char parse_char() {
    if (peek() == '\\') {
      ++pos_;
      if (at_end()) fail("dangling escape");
    }
    if (peek() == '\n') fail("newline in query");
    return text_[pos_++];
  }

  CharSet parse_class() {
    expect('[');
    if (peek() == '^') fail("negated classes are not supported");
    CharSet set;
    while (!at_end() && peek() != ']') {
      const unsigned char first = static_cast<unsigned char>(parse_char());
      if (peek() == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] != ']') {
        ++pos_;
        const unsigned char last = static_cast<unsigned char>(parse_char());
        if (last < first) fail("reversed character range");
        for (unsigned c = first; c <= last; ++c) set.set(c);
      } else {
        set.set(first);
      }
    }
    expect(']');
    if (set.none()) fail("empty character class");
    return set;
  }

  Key parse_key() {
    std::vector<CharSet> positions;
    while (!at_end() && peek() != ')' && peek() != '|') {
      if (peek() == '[') {
        positions.push_back(parse_class());
      } else if (peek() != '\\' && is_meta(peek())) {
        fail(std::string("unexpected '") + peek() + "' inside key");
      } else {
        CharSet one;
        one.set(static_cast<unsigned char>(parse_char()));
        positions.push_back(one);
      }
    }
    if (positions.empty()) fail("empty key");
    return Key(std::move(positions));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool contains_key(const std::vector<Element>& elements) {
  for (const auto& e : elements) {
    if (std::holds_alternative<Key>(e.node)) return true;
    if (const auto* alt = std::get_if<Alternation>(&e.node)) {
      for (const auto& b : alt->branches) {
        if (contains_key(b)) return true;
      }
    }
  }
  return false;
}

std::size_t count_sequence(const std::vector<Element>& elements) {
  std::size_t n = 1;
  for (const auto& e : elements) {
    if (const auto* alt = std::get_if<Alternation>(&e.node)) {
      std::size_t branches = 0;
      for (const auto& b : alt->branches) {
        branches = saturating_add(branches, count_sequence(b));
      }
      n = saturating_mul(n, branches);
    }
  }
  return n;
}

using Piece = std::variant<Key, Gap>;
using PieceSeq = std::vector<Piece>;

std::vector<PieceSeq> expand_sequence(const std::vector<Element>& elements) {
  std::vector<PieceSeq> acc(1);
  for (const auto& e : elements) {
    if (const auto* key = std::get_if<Key>(&e.node)) {
      for (auto& seq : acc) seq.emplace_back(*key);
    } else if (const auto* gap = std::get_if<Gap>(&e.node)) {
      for (auto& seq : acc) seq.emplace_back(*gap);
    } else {
      const auto& alt = std::get<Alternation>(e.node);
      std::vector<PieceSeq> options;
      for (const auto& b : alt.branches) {
        auto sub = expand_sequence(b);
        options.insert(options.end(), std::make_move_iterator(sub.begin()),
                       std::make_move_iterator(sub.end()));
      }
      std::vector<PieceSeq> next;
      next.reserve(acc.size() * options.size());
      for (const auto& prefix : acc) {
        for (const auto& opt : options) {
          PieceSeq joined = prefix;
          joined.insert(joined.end(), opt.begin(), opt.end());
          next.push_back(std::move(joined));
        }
      }
      acc = std::move(next);
    }
  }
  return acc;
}

SubQuery normalize(const PieceSeq& pieces, std::size_t query_id) {
  SubQuery sq;
  sq.origin = query_id;
  bool last_was_key = false;
  std::optional<Gap> pending;
  for (const auto& p : pieces) {
    if (const auto* key = std::get_if<Key>(&p)) {
      if (pending) {
        if (sq.keys.empty()) {
          throw DataError("query " + std::to_string(query_id) +
                          ": a sub-query may not begin with a gap");
        }
        sq.gaps.push_back(*pending);
        pending.reset();
        sq.keys.push_back(*key);
      } else if (last_was_key) {
        std::vector<CharSet> merged = sq.keys.back().positions();
        merged.insert(merged.end(), key->positions().begin(),
                      key->positions().end());
        sq.keys.back() = Key(std::move(merged));
      } else {
        sq.keys.push_back(*key);
      }
      last_was_key = true;
    } else {
      const Gap& g = std::get<Gap>(p);
      if (sq.keys.empty()) {
        throw DataError("query " + std::to_string(query_id) +
                        ": a sub-query may not begin with a gap");
      }
      if (pending) {
        pending->lo += g.lo;
        pending->hi += g.hi;
      } else {
        pending = g;
      }
      last_was_key = false;
    }
  }
  if (pending) {
    throw DataError("query " + std::to_string(query_id) +
                    ": a sub-query may not end with a gap");
  }
  if (sq.keys.empty()) {
    throw DataError("query " + std::to_string(query_id) + " has a branch without keys");
  }
  return sq;
}

void escape_into(std::string& out, char c, bool in_class) {
  const bool needs = in_class ? (c == ']' || c == '\\' || c == '-' || c == '^')
                              : is_meta(c);
  if (needs) out.push_back('\\');
  out.push_back(c);
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

class OrderedGramSet {
 public:
  void add(std::string g) {
    if (seen_.insert(g).second) items_.push_back(std::move(g));
  }
  std::vector<std::string> take() { return std::move(items_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<std::string> items_;
};

}  // namespace

Key::Key(std::string_view literal) {
  positions_.reserve(literal.size());
  for (unsigned char c : literal) {
    CharSet s;
    s.set(c);
    positions_.push_back(s);
  }
}

Key::Key(std::vector<CharSet> positions) : positions_(std::move(positions)) {
  for (const auto& p : positions_) {
    if (p.none()) throw DataError("key position with an empty character set");
  }
}

bool Key::is_literal() const noexcept { return is_literal(0, positions_.size()); }

bool Key::is_literal(std::size_t from, std::size_t to) const noexcept {
  for (std::size_t i = from; i < to && i < positions_.size(); ++i) {
    if (positions_[i].count() != 1) return false;
  }
  return true;
}

std::string Key::literal() const {
  std::string out;
  out.reserve(positions_.size());
  for (const auto& p : positions_) {
    if (p.count() != 1) throw DataError("key " + to_string() + " is not literal");
    for (unsigned c = 0; c < 256; ++c) {
      if (p.test(c)) {
        out.push_back(static_cast<char>(c));
        break;
      }
    }
  }
  return out;
}

std::string Key::to_string() const {
  std::string out;
  for (const auto& p : positions_) {
    if (p.count() == 1) {
      for (unsigned c = 0; c < 256; ++c) {
        if (p.test(c)) escape_into(out, static_cast<char>(c), false);
      }
    } else {
      out.push_back('[');
      for (unsigned c = 0; c < 256; ++c) {
        if (p.test(c)) escape_into(out, static_cast<char>(c), true);
      }
      out.push_back(']');
    }
  }
  return out;
}

std::size_t Key::instantiation_count(std::size_t from, std::size_t to,
                                     std::size_t cap) const noexcept {
  std::size_t n = 1;
  for (std::size_t i = from; i < to && i < positions_.size(); ++i) {
    n = saturating_mul(n, positions_[i].count());
    if (n > cap) return cap + 1;
  }
  return n;
}

std::optional<std::vector<std::string>> Key::instantiations(
    std::size_t from, std::size_t to, std::size_t cap) const {
  if (instantiation_count(from, to, cap) > cap) return std::nullopt;
  std::vector<std::string> out(1);
  for (std::size_t i = from; i < to; ++i) {
    std::vector<std::string> next;
    next.reserve(out.size() * positions_[i].count());
    for (const auto& prefix : out) {
      for (unsigned c = 0; c < 256; ++c) {
        if (positions_[i].test(c)) next.push_back(prefix + static_cast<char>(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool SubQuery::is_literal() const noexcept {
  return std::all_of(keys.begin(), keys.end(),
                     [](const Key& k) { return k.is_literal(); });
}

std::string SubQuery::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0) {
      const Gap& g = gaps[i - 1];
      out += ".{" + std::to_string(g.lo) + "," + std::to_string(g.hi) + "}";
    }
    out += "(" + keys[i].to_string() + ")";
  }
  return out;
}

RegexQuery parse_query(std::string_view text) {
  RegexQuery q;
  q.source_text = std::string(text);
  q.elements = Parser(text).parse();
  if (!contains_key(q.elements)) throw ParseError("query has no key", 0);
  return q;
}

std::size_t expansion_count(const RegexQuery& query) {
  return count_sequence(query.elements);
}

std::vector<SubQuery> expand_or(const RegexQuery& query, std::size_t query_id,
                                std::size_t cap) {
  const std::size_t n = expansion_count(query);
  if (n > cap) throw ExpansionLimitError(n, cap);
  std::vector<SubQuery> out;
  out.reserve(n);
  std::unordered_map<std::string, std::size_t> first;
  for (const auto& seq : expand_sequence(query.elements)) {
    SubQuery sq = normalize(seq, query_id);
    auto [it, inserted] = first.try_emplace(sq.to_string(), out.size());
    if (!inserted) sq.duplicate_of = it->second;
    out.push_back(std::move(sq));
  }
  return out;
}

KeyGramSets key_grams(const SubQuery& sq, const GramOptions& options) {
  if (options.min_len < 1) throw DataError("min_len must be at least 1");
  OrderedGramSet m_q, m_bar;
  KeyGramSets result;
  for (std::size_t k = 0; k < sq.keys.size(); ++k) {
    const Key& key = sq.keys[k];
    const std::size_t n = key.length();
    if (key.is_literal()) {
      const std::string text = key.literal();
      if (n >= options.min_len) m_q.add(text);
      for (std::size_t len = options.min_len; len <= n; ++len) {
        for (std::size_t s = 0; s + len <= n; ++s) m_bar.add(text.substr(s, len));
      }
      continue;
    }

    // Class windows share one instantiation budget per key.
    std::size_t budget = 0;
    for (std::size_t len = options.min_len;
         len <= std::min(n, options.class_window); ++len) {
      for (std::size_t s = 0; s + len <= n; ++s) {
        if (key.is_literal(s, s + len)) continue;
        budget = saturating_add(
            budget, key.instantiation_count(s, s + len, options.instantiation_cap));
      }
    }
    const bool truncated = budget > options.instantiation_cap;
    if (truncated) result.truncated_keys.push_back(k);

    if (!truncated && n >= options.min_len && n <= options.class_window) {
      if (auto all = key.instantiations(0, n, options.instantiation_cap)) {
        for (auto& g : *all) m_q.add(std::move(g));
      }
    }
    for (std::size_t len = options.min_len; len <= n; ++len) {
      for (std::size_t s = 0; s + len <= n; ++s) {
        if (key.is_literal(s, s + len)) {
          m_bar.add(Key(std::vector<CharSet>(key.positions().begin() + s,
                                             key.positions().begin() + s + len))
                        .literal());
        } else if (!truncated && len <= options.class_window) {
          if (auto window = key.instantiations(s, s + len, options.instantiation_cap)) {
            for (auto& g : *window) m_bar.add(std::move(g));
          }
        }
      }
    }
  }
  result.m_q = m_q.take();
  result.m_bar_q = m_bar.take();
  return result;
}

std::vector<RegexQuery> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open query file " + path.string());
  std::vector<RegexQuery> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    try {
      out.push_back(parse_query(text));
    } catch (const ParseError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void save_queries(const std::vector<std::string>& lines,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write query file " + path.string());
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw IoError("write failure on " + path.string());
}

std::vector<SubQuery> expand_workload(const std::vector<RegexQuery>& queries,
                                      std::size_t cap) {
  std::vector<SubQuery> out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto subs = expand_or(queries[i], i, cap);
    const std::size_t base = out.size();
    for (auto& sq : subs) {
      if (sq.duplicate_of) *sq.duplicate_of += base;
      out.push_back(std::move(sq));
    }
  }
  return out;
}

}  // namespace mgram
