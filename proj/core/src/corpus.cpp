#include "mgram/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mgram/error.hpp"

namespace mgram {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

Corpus::Corpus(std::vector<std::string> records,
               std::optional<std::string> alphabet)
    : records_(std::move(records)) {
  if (alphabet) {
    for (unsigned char c : *alphabet) {
      if (c == '\n') throw DataError("alphabet may not contain a newline");
      member_[c] = true;
    }
  }
  bool seen[256] = {};
  std::uint64_t h = kFnvOffset;
  for (std::size_t id = 0; id < records_.size(); ++id) {
    const std::string& text = records_[id];
    for (std::size_t off = 0; off < text.size(); ++off) {
      const auto c = static_cast<unsigned char>(text[off]);
      if (c == '\n') {
        throw DataError("record " + std::to_string(id) +
                        " contains a newline at offset " + std::to_string(off));
      }
      if (alphabet && !member_[c]) {
        throw DataError("record " + std::to_string(id) + " offset " +
                        std::to_string(off) + ": character '" +
                        std::string(1, static_cast<char>(c)) +
                        "' is outside the declared alphabet");
      }
      seen[c] = true;
    }
    total_chars_ += text.size();
    h = fnv1a(h, text);
    h = fnv1a(h, "\n");
  }
  fingerprint_ = h;
  if (!alphabet) {
    for (int c = 0; c < 256; ++c) member_[c] = seen[c];
  }
  for (int c = 0; c < 256; ++c) {
    if (member_[c]) alphabet_.push_back(static_cast<char>(c));
  }
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fingerprint));
  return buf;
}

std::uint64_t parse_fingerprint_hex(std::string_view hex) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc() || ptr != hex.data() + hex.size() || hex.size() != 16) {
    throw DataError("malformed corpus fingerprint '" + std::string(hex) + "'");
  }
  return value;
}

Corpus load_corpus(const std::filesystem::path& path,
                   std::optional<std::string> alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  std::vector<std::string> records;
  std::string line;
  while (std::getline(in, line)) records.push_back(std::move(line));
  if (in.bad()) throw IoError("read failure on " + path.string());
  return Corpus(std::move(records), std::move(alphabet));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write corpus file " + path.string());
  for (const auto& r : corpus.records()) out << r << '\n';
  if (!out) throw IoError("write failure on " + path.string());
}

std::size_t support(const Corpus& corpus, std::string_view gram) {
  if (gram.empty()) return corpus.size();
  std::size_t n = 0;
  for (const auto& r : corpus.records()) {
    if (r.find(gram) != std::string::npos) ++n;
  }
  return n;
}

std::vector<RecordId> records_containing(const Corpus& corpus,
                                         std::string_view gram) {
  std::vector<RecordId> ids;
  const auto records = corpus.records();
  for (std::size_t id = 0; id < records.size(); ++id) {
    if (gram.empty() || records[id].find(gram) != std::string::npos) {
      ids.push_back(static_cast<RecordId>(id));
    }
  }
  return ids;
}

std::unordered_map<std::string, std::size_t> count_supports(
    const Corpus& corpus, std::span<const std::string> grams) {
  std::unordered_map<std::string, std::size_t> result;
  std::map<std::size_t, std::vector<std::string_view>> by_length;
  for (const auto& g : grams) {
    auto [it, inserted] = result.try_emplace(g, 0);
    if (inserted) by_length[g.size()].push_back(it->first);
  }
  if (auto empty = result.find(std::string()); empty != result.end()) {
    empty->second = corpus.size();
    by_length.erase(0);
  }

  const auto records = corpus.records();
  for (const auto& [len, list] : by_length) {
    std::unordered_map<std::string_view, std::size_t> slot;
    slot.reserve(list.size() * 2);
    for (std::size_t i = 0; i < list.size(); ++i) slot.emplace(list[i], i);
    std::vector<std::size_t> counts(list.size(), 0);
    // Last record (plus one) in which each gram was counted.
    std::vector<std::size_t> stamp(list.size(), 0);
    for (std::size_t id = 0; id < records.size(); ++id) {
      const std::string_view text = records[id];
      if (text.size() < len) continue;
      for (std::size_t pos = 0; pos + len <= text.size(); ++pos) {
        auto it = slot.find(text.substr(pos, len));
        if (it == slot.end()) continue;
        if (stamp[it->second] != id + 1) {
          stamp[it->second] = id + 1;
          ++counts[it->second];
        }
      }
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      result.find(std::string(list[i]))->second = counts[i];
    }
  }
  return result;
}

std::vector<GramSupport> enumerate_grams(const Corpus& corpus,
                                         std::size_t min_len,
                                         std::size_t max_len) {
  if (min_len < 1 || min_len > max_len) {
    throw DataError("enumerate_grams requires 1 <= min_len <= max_len");
  }
  std::map<std::string_view, std::size_t> supports;
  std::set<std::string_view> in_record;
  for (const auto& rec : corpus.records()) {
    const std::string_view text = rec;
    in_record.clear();
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
      for (std::size_t len = min_len; len <= max_len && pos + len <= text.size();
           ++len) {
        in_record.insert(text.substr(pos, len));
      }
    }
    for (auto g : in_record) ++supports[g];
  }
  std::vector<GramSupport> out;
  out.reserve(supports.size());
  for (const auto& [g, s] : supports) out.push_back({std::string(g), s});
  return out;
}

}  // namespace mgram
