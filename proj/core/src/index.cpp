#include "mgram/index.hpp"

#include <zlib.h>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mgram/error.hpp"

namespace mgram {
namespace {

// One constraint on the candidate set together with the grams behind it.
struct Unit {
  std::vector<RecordId> records;
  std::vector<std::size_t> grams;  // indices into the index's gram list
};

std::vector<RecordId> intersect(const std::vector<RecordId>& a, const std::vector<RecordId>& b) {
  std::vector<RecordId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Indexed grams occurring in `text`, as sorted unique indices.
std::vector<std::size_t> grams_inside(const IndexArtifact& index, std::string_view text,
                                      const std::unordered_map<std::string_view, std::size_t>& ids) {
  std::vector<std::size_t> found;
  const std::size_t longest = std::min(text.size(), index.max_gram_length());
  for (std::size_t len = 1; len <= longest; ++len) {
    for (std::size_t s = 0; s + len <= text.size(); ++s) {
      auto it = ids.find(text.substr(s, len));
      if (it != ids.end()) found.push_back(it->second);
    }
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

std::vector<RecordId> intersect_postings(const IndexArtifact& index,
                                         const std::vector<std::size_t>& grams) {
  std::vector<std::size_t> order = grams;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return index.postings_at(a).size() < index.postings_at(b).size();
  });
  std::vector<RecordId> acc = index.postings_at(order.front());
  for (std::size_t k = 1; k < order.size() && !acc.empty(); ++k) {
    acc = intersect(acc, index.postings_at(order[k]));
  }
  return acc;
}

// Key windows worth probing: the whole key when literal, otherwise for each
// start the longest window within `width` positions whose instantiation
// count fits the cap, skipping windows contained in the previous one.
std::vector<std::pair<std::size_t, std::size_t>> key_windows(const Key& key, std::size_t width,
                                                             std::size_t cap) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = key.length();
  if (key.is_literal()) {
    out.emplace_back(0, n);
    return out;
  }
  std::size_t prev_end = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t e = std::min(n, s + width);
    while (e > s && key.instantiation_count(s, e, cap) > cap) --e;
    if (e == s || e <= prev_end) continue;
    out.emplace_back(s, e);
    prev_end = e;
  }
  return out;
}

std::string meta_line(const IndexMeta& m) {
  std::ostringstream out;
  out << "# mode=" << m.mode << " min_len=" << m.min_len << " seed=" << m.seed
      << " records=" << m.records << " total_chars=" << m.total_chars
      << " total_postings=" << m.total_postings << " prefix_free=" << (m.prefix_free ? 1 : 0)
      << " record_bound=" << (m.record_bound ? 1 : 0);
  return out.str();
}

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks to stay portable.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - pos, 1U << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), static_cast<uInt>(chunk));
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::size_t parse_size(std::string_view text, const char* what) {
  if (text.empty()) throw DataError(std::string("index file: empty ") + what);
  std::size_t v = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw DataError(std::string("index file: bad ") + what);
    v = v * 10 + static_cast<std::size_t>(ch - '0');
  }
  return v;
}

}  // namespace

IndexArtifact::IndexArtifact(IndexMeta meta, std::vector<std::string> grams,
                             std::vector<std::vector<RecordId>> postings)
    : meta_(std::move(meta)), grams_(std::move(grams)), postings_(std::move(postings)) {
  if (grams_.size() != postings_.size()) throw InternalError("index grams and postings differ in count");
  for (std::size_t i = 0; i < grams_.size(); ++i) {
    if (grams_[i].empty()) throw DataError("index contains an empty gram");
    if (i > 0 && !(grams_[i - 1] < grams_[i])) throw DataError("index grams are not strictly ascending");
    const auto& list = postings_[i];
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (k > 0 && list[k - 1] >= list[k]) {
        throw DataError("posting list of '" + grams_[i] + "' is not strictly increasing");
      }
      if (list[k] >= meta_.records) {
        throw DataError("posting list of '" + grams_[i] + "' names record " +
                        std::to_string(list[k]) + " beyond the corpus");
      }
    }
    max_len_ = std::max(max_len_, grams_[i].size());
  }
}

const std::vector<RecordId>* IndexArtifact::postings(std::string_view gram) const {
  auto it = std::lower_bound(grams_.begin(), grams_.end(), gram);
  if (it == grams_.end() || *it != gram) return nullptr;
  return &postings_[static_cast<std::size_t>(it - grams_.begin())];
}

bool operator==(const IndexArtifact& a, const IndexArtifact& b) {
  const IndexMeta& x = a.meta_;
  const IndexMeta& y = b.meta_;
  return x.corpus_fingerprint == y.corpus_fingerprint && x.mode == y.mode &&
         x.min_len == y.min_len && x.seed == y.seed && x.records == y.records &&
         x.total_chars == y.total_chars && x.total_postings == y.total_postings &&
         x.prefix_free == y.prefix_free && x.record_bound == y.record_bound &&
         a.grams_ == b.grams_ && a.postings_ == b.postings_;
}

IndexArtifact build_index(const Corpus& corpus, const GramSelection& sel) {
  if (sel.corpus_fingerprint != corpus.fingerprint()) {
    throw DataError("selection was made for corpus " + fingerprint_hex(sel.corpus_fingerprint) +
                    ", not " + fingerprint_hex(corpus.fingerprint()));
  }
  std::vector<std::string> grams = sel.gram_texts();
  std::sort(grams.begin(), grams.end());
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());

  std::unordered_map<std::string_view, std::size_t> ids;
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < grams.size(); ++i) {
    ids.emplace(grams[i], i);
    lengths.push_back(grams[i].size());
  }
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());

  std::vector<std::vector<RecordId>> postings(grams.size());
  const auto records = corpus.records();
  for (std::size_t r = 0; r < records.size(); ++r) {
    const std::string_view text = records[r];
    const auto id = static_cast<RecordId>(r);
    for (std::size_t len : lengths) {
      for (std::size_t s = 0; s + len <= text.size(); ++s) {
        auto it = ids.find(text.substr(s, len));
        if (it == ids.end()) continue;
        auto& list = postings[it->second];
        if (list.empty() || list.back() != id) list.push_back(id);
      }
    }
  }

  IndexMeta meta;
  meta.corpus_fingerprint = corpus.fingerprint();
  meta.mode = to_string(sel.mode);
  meta.min_len = sel.params.min_len;
  meta.seed = sel.params.seed;
  meta.records = corpus.size();
  meta.total_chars = corpus.total_chars();
  for (const auto& list : postings) meta.total_postings += list.size();
  meta.prefix_free = !verify_prefix_free(grams).has_value();
  meta.record_bound = meta.total_postings <= meta.records;
  if (is_prefix_free_mode(sel.mode)) {
    if (auto bad = verify_prefix_free(grams)) {
      throw InternalError(meta.mode + " selection is not prefix-free: '" + bad->prefix +
                          "' prefixes '" + bad->longer + "'");
    }
    if (meta.total_postings > meta.total_chars) {
      throw InternalError("prefix-free index holds " + std::to_string(meta.total_postings) +
                          " postings, more than the corpus's " +
                          std::to_string(meta.total_chars) + " characters");
    }
  }
  return IndexArtifact(std::move(meta), std::move(grams), std::move(postings));
}

void check_fingerprint(const IndexArtifact& index, const Corpus& corpus) {
  if (index.meta().corpus_fingerprint != corpus.fingerprint()) {
    throw DataError("index was built over corpus " + fingerprint_hex(index.meta().corpus_fingerprint) +
                    " but the given corpus is " + fingerprint_hex(corpus.fingerprint()));
  }
}

bool postings_match_corpus(const IndexArtifact& index, const Corpus& corpus) {
  if (index.meta().records != corpus.size()) return false;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (records_containing(corpus, index.grams()[i]) != index.postings_at(i)) return false;
  }
  return true;
}

CandidateResult candidates(const IndexArtifact& index, const SubQuery& sq,
                           const CandidateOptions& options) {
  if (index.size() == 0) return {FullScan{"index is empty"}};
  std::unordered_map<std::string_view, std::size_t> ids;
  for (std::size_t i = 0; i < index.size(); ++i) ids.emplace(index.grams()[i], i);
  const std::size_t width = std::max(index.max_gram_length(), options.grams.class_window);
  const std::size_t cap = options.grams.instantiation_cap;

  std::vector<Unit> units;
  for (const Key& key : sq.keys) {
    for (const auto& [s, e] : key_windows(key, width, cap)) {
      const auto texts = key.instantiations(s, e, cap);
      if (!texts) continue;
      std::vector<std::vector<std::size_t>> per_text;
      bool covered = true;
      for (const auto& x : *texts) {
        per_text.push_back(grams_inside(index, x, ids));
        if (per_text.back().empty()) {
          covered = false;
          break;
        }
      }
      if (!covered) continue;
      if (per_text.size() == 1 && options.single_gram) {
        for (std::size_t g : per_text.front()) units.push_back({index.postings_at(g), {g}});
        continue;
      }
      std::map<std::vector<std::size_t>, bool> distinct;
      for (auto& gs : per_text) distinct.emplace(std::move(gs), true);
      std::vector<char> mark(index.meta().records, 0);
      Unit unit;
      for (const auto& [gs, unused] : distinct) {
        for (RecordId r : intersect_postings(index, gs)) mark[r] = 1;
        unit.grams.insert(unit.grams.end(), gs.begin(), gs.end());
      }
      for (std::size_t r = 0; r < mark.size(); ++r) {
        if (mark[r]) unit.records.push_back(static_cast<RecordId>(r));
      }
      std::sort(unit.grams.begin(), unit.grams.end());
      unit.grams.erase(std::unique(unit.grams.begin(), unit.grams.end()), unit.grams.end());
      units.push_back(std::move(unit));
    }
  }
  if (units.empty()) return {FullScan{"no indexed gram"}};

  IndexHit hit;
  std::vector<std::size_t> used;
  if (options.single_gram) {
    std::size_t best = 0;
    for (std::size_t u = 1; u < units.size(); ++u) {
      if (units[u].records.size() < units[best].records.size()) best = u;
    }
    hit.records = std::move(units[best].records);
    used = std::move(units[best].grams);
  } else {
    std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) {
      return a.records.size() < b.records.size();
    });
    hit.records = units.front().records;
    for (std::size_t u = 0; u < units.size(); ++u) {
      if (u > 0) hit.records = intersect(hit.records, units[u].records);
      used.insert(used.end(), units[u].grams.begin(), units[u].grams.end());
    }
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (std::size_t g : used) hit.grams.push_back(index.grams()[g]);
  return {std::move(hit)};
}

void write_index(const IndexArtifact& index, std::ostream& out) {
  std::ostringstream body;
  body << "MGIDX v1 " << fingerprint_hex(index.meta().corpus_fingerprint) << ' ' << index.size()
       << '\n';
  body << meta_line(index.meta()) << '\n';
  for (std::size_t i = 0; i < index.size(); ++i) {
    body << index.grams()[i] << '\t';
    const auto& list = index.postings_at(i);
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (k > 0) body << ',';
      body << list[k];
    }
    body << '\n';
  }
  const std::string bytes = body.str();
  char crc[16];
  std::snprintf(crc, sizeof crc, "%08" PRIx32, crc_of(bytes));
  out << bytes << "CRC32 " << crc << '\n';
}

IndexArtifact read_index(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // The checksum line is the last line and covers every byte before it.
  if (data.empty() || data.back() != '\n') throw DataError("index file: truncated (no checksum line)");
  const auto line_start = data.rfind('\n', data.size() - 2);
  const std::size_t crc_pos = line_start == std::string::npos ? 0 : line_start + 1;
  const std::string_view crc_line(data.data() + crc_pos, data.size() - crc_pos - 1);
  if (crc_line.size() != 14 || crc_line.substr(0, 6) != "CRC32 ") {
    throw DataError("index file: truncated (no checksum line)");
  }
  char expect[16];
  std::snprintf(expect, sizeof expect, "%08" PRIx32,
                crc_of(std::string_view(data.data(), crc_pos)));
  if (crc_line.substr(6) != expect) throw DataError("index file: checksum mismatch");

  std::istringstream body(data.substr(0, crc_pos));
  std::string line;
  std::getline(body, line);
  std::istringstream header(line);
  std::string magic, version, fp;
  std::size_t count = 0;
  if (!(header >> magic >> version >> fp >> count) || magic != "MGIDX") {
    throw DataError("index file: bad header");
  }
  if (version != "v1") throw DataError("index file: unsupported version '" + version + "'");
  IndexMeta meta;
  meta.corpus_fingerprint = parse_fingerprint_hex(fp);
  if (!std::getline(body, line) || line.rfind("# ", 0) != 0) {
    throw DataError("index file: missing metadata line");
  }
  std::istringstream fields(line.substr(2));
  std::string kv;
  while (fields >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DataError("index file: bad metadata field '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "mode") meta.mode = value;
    else if (key == "min_len") meta.min_len = parse_size(value, "min_len");
    else if (key == "seed") meta.seed = parse_size(value, "seed");
    else if (key == "records") meta.records = parse_size(value, "records");
    else if (key == "total_chars") meta.total_chars = parse_size(value, "total_chars");
    else if (key == "total_postings") meta.total_postings = parse_size(value, "total_postings");
    else if (key == "prefix_free") meta.prefix_free = value == "1";
    else if (key == "record_bound") meta.record_bound = value == "1";
  }
  std::vector<std::string> grams;
  std::vector<std::vector<RecordId>> postings;
  std::size_t total = 0;
  while (std::getline(body, line)) {
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError("index file: malformed gram line " + std::to_string(grams.size() + 3));
    }
    grams.push_back(line.substr(0, tab));
    std::vector<RecordId> list;
    std::string_view ids(line.data() + tab + 1, line.size() - tab - 1);
    while (!ids.empty()) {
      const auto comma = ids.find(',');
      const auto tok = ids.substr(0, comma);
      list.push_back(static_cast<RecordId>(parse_size(tok, "record id")));
      ids = comma == std::string_view::npos ? std::string_view() : ids.substr(comma + 1);
    }
    total += list.size();
    postings.push_back(std::move(list));
  }
  if (grams.size() != count) {
    throw DataError("index file: header announces " + std::to_string(count) + " grams, found " +
                    std::to_string(grams.size()));
  }
  if (total != meta.total_postings) throw DataError("index file: posting total disagrees with metadata");
  return IndexArtifact(std::move(meta), std::move(grams), std::move(postings));
}

void save_index(const IndexArtifact& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_index(index, out);
  if (!out) throw IoError("write failed for " + path.string());
}

IndexArtifact load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_index(in);
}

}  // namespace mgram
