#include "qsem/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qsem/errors.hpp"
#include "qsem/textio.hpp"

namespace qsem::corpus {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

// Lenient UTF-8 decoding: an invalid lead or continuation byte decodes as a
// single opaque code point.
CodePoint decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t k) -> int {
    if (pos + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) {
      return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3),
              4};
    }
  }
  return {0xFFFD, 1};
}

bool is_unicode_space(char32_t c) noexcept {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_ascii_alnum(unsigned char c) noexcept {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::string normalize_token(std::string_view raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  // Only ASCII bytes can be punctuation; bytes >= 0x80 belong to word chars.
  while (b < e && static_cast<unsigned char>(raw[b]) < 0x80 &&
         !is_ascii_alnum(static_cast<unsigned char>(raw[b]))) {
    ++b;
  }
  while (e > b && static_cast<unsigned char>(raw[e - 1]) < 0x80 &&
         !is_ascii_alnum(static_cast<unsigned char>(raw[e - 1]))) {
    --e;
  }
  std::string out(raw.substr(b, e - b));
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

Corpus ingest_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("'" + dir.string() + "' is not a readable directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  Corpus c;
  for (const auto& f : files) {
    c.add({f.stem().string(), tokenize(textio::read_file(f))});
  }
  return c;
}

nlohmann::json index_payload(const TermDocumentIndex& ix) {
  nlohmann::json triplets = nlohmann::json::array();
  for (const auto& e : ix.entries()) {
    triplets.push_back(nlohmann::json::array({e.term, e.doc, e.weight}));
  }
  return nlohmann::json{{"version", kIndexVersion},
                        {"weighting", std::string(to_string(ix.weighting()))},
                        {"vocab", ix.vocab()},
                        {"doc_ids", ix.doc_ids()},
                        {"triplets", std::move(triplets)}};
}

std::string checksum_line(std::string_view payload) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload)));
  return std::string("checksum fnv1a64:") + hex;
}

}  // namespace

void Corpus::add(Document doc) {
  if (!ids_.insert(doc.id).second) {
    throw ParseError("duplicate doc_id '" + doc.id + "'");
  }
  docs_.push_back(std::move(doc));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  auto flush = [&](std::size_t end) {
    if (start == std::string_view::npos) return;
    auto tok = normalize_token(text.substr(start, end - start));
    if (!tok.empty()) tokens.push_back(std::move(tok));
    start = std::string_view::npos;
  };
  while (pos < text.size()) {
    const auto cp = decode_utf8(text, pos);
    if (is_unicode_space(cp.value)) {
      flush(pos);
    } else if (start == std::string_view::npos) {
      start = pos;
    }
    pos += cp.length;
  }
  flush(text.size());
  return tokens;
}

Corpus ingest_tsv(std::istream& in) {
  Corpus c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": missing TAB separator");
    }
    std::string id = line.substr(0, tab);
    if (id.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty doc_id");
    c.add({std::move(id), tokenize(std::string_view(line).substr(tab + 1))});
  }
  if (in.bad()) throw IoError("error reading corpus stream");
  return c;
}

Corpus ingest(const std::filesystem::path& source, SourceFormat format) {
  if (format == SourceFormat::kDirOfTextFiles) return ingest_directory(source);
  std::ifstream in(source, std::ios::binary);
  if (!in) throw IoError("cannot open '" + source.string() + "' for reading");
  return ingest_tsv(in);
}

std::string_view to_string(Weighting w) noexcept {
  return w == Weighting::kCount ? "count" : "tfidf";
}

Weighting parse_weighting(std::string_view name) {
  if (name == "count") return Weighting::kCount;
  if (name == "tfidf") return Weighting::kTfIdf;
  throw InvalidArgument("unknown weighting '" + std::string(name) +
                        "' (expected count or tfidf)");
}

TermDocumentIndex::TermDocumentIndex(std::vector<std::string> vocab,
                                     std::vector<std::string> doc_ids,
                                     std::vector<Entry> entries, Weighting weighting)
    : vocab_(std::move(vocab)),
      doc_ids_(std::move(doc_ids)),
      entries_(std::move(entries)),
      weighting_(weighting) {
  if (!std::is_sorted(vocab_.begin(), vocab_.end()) ||
      std::adjacent_find(vocab_.begin(), vocab_.end()) != vocab_.end()) {
    throw CorruptDataError("index vocabulary must be sorted and unique");
  }
  if (std::set<std::string>(doc_ids_.begin(), doc_ids_.end()).size() != doc_ids_.size()) {
    throw CorruptDataError("index doc_ids must be unique");
  }
  row_offsets_.assign(vocab_.size() + 1, 0);
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.term >= vocab_.size() || e.doc >= doc_ids_.size()) {
      throw CorruptDataError("index entry out of range");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw CorruptDataError("index weights must be finite and non-negative");
    }
    if (k > 0) {
      const auto& p = entries_[k - 1];
      if (p.term > e.term || (p.term == e.term && p.doc >= e.doc)) {
        throw CorruptDataError("index entries must be sorted by (term, doc) and unique");
      }
    }
    ++row_offsets_[e.term + 1];
  }
  for (std::size_t t = 0; t < vocab_.size(); ++t) row_offsets_[t + 1] += row_offsets_[t];
}

std::optional<std::size_t> TermDocumentIndex::term_index(std::string_view term) const {
  const auto it = std::lower_bound(vocab_.begin(), vocab_.end(), term);
  if (it == vocab_.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - vocab_.begin());
}

std::optional<std::size_t> TermDocumentIndex::doc_index(std::string_view doc_id) const {
  const auto it = std::find(doc_ids_.begin(), doc_ids_.end(), doc_id);
  if (it == doc_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - doc_ids_.begin());
}

std::span<const Entry> TermDocumentIndex::row(std::size_t term) const {
  return std::span<const Entry>(entries_).subspan(
      row_offsets_[term], row_offsets_[term + 1] - row_offsets_[term]);
}

RealMatrix TermDocumentIndex::dense() const {
  RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(num_terms()),
                                  static_cast<Eigen::Index>(num_docs()));
  for (const auto& e : entries_) m(e.term, e.doc) = e.weight;
  return m;
}

bool operator==(const TermDocumentIndex& a, const TermDocumentIndex& b) {
  return a.weighting_ == b.weighting_ && a.vocab_ == b.vocab_ &&
         a.doc_ids_ == b.doc_ids_ && a.entries_ == b.entries_;
}

TermDocumentIndex build_index(const Corpus& c, Weighting weighting, std::size_t min_df) {
  if (c.empty()) throw InvalidArgument("build_index: empty corpus");
  if (min_df < 1) throw InvalidArgument("build_index: min_df must be >= 1");
  // term -> (doc -> tf); std::map keeps both orders sorted.
  std::map<std::string, std::map<std::uint32_t, std::uint32_t>> tf;
  const auto& docs = c.docs();
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d].tokens) ++tf[tok][static_cast<std::uint32_t>(d)];
  }
  const double n_docs = static_cast<double>(docs.size());
  std::vector<std::string> vocab;
  std::vector<Entry> entries;
  for (const auto& [term, postings] : tf) {
    if (postings.size() < min_df) continue;
    const auto t = static_cast<std::uint32_t>(vocab.size());
    vocab.push_back(term);
    const double idf = std::log(n_docs / static_cast<double>(postings.size()));
    for (const auto& [d, count] : postings) {
      const double w = weighting == Weighting::kCount ? static_cast<double>(count)
                                                      : static_cast<double>(count) * idf;
      entries.push_back({t, d, w});
    }
  }
  std::vector<std::string> doc_ids;
  doc_ids.reserve(docs.size());
  for (const auto& d : docs) doc_ids.push_back(d.id);
  return TermDocumentIndex(std::move(vocab), std::move(doc_ids), std::move(entries),
                           weighting);
}

RealVector term_vector(const TermDocumentIndex& ix, std::string_view term) {
  const auto t = ix.term_index(term);
  if (!t) throw UnknownTermError(std::string(term));
  RealVector v = RealVector::Zero(static_cast<Eigen::Index>(ix.num_docs()));
  for (const auto& e : ix.row(*t)) v(e.doc) = e.weight;
  return v;
}

std::size_t numerical_rank(const RealMatrix& m) {
  if (m.size() == 0) return 0;
  const auto s = svd<Real>(m).singular_values;
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                        std::numeric_limits<double>::epsilon() * s(0);
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff) ++r;
  }
  return r;
}

LsaReduction lsa_reduce(const TermDocumentIndex& ix, std::size_t k) {
  const RealMatrix m = ix.dense();
  const auto f = svd<Real>(m);
  const double cutoff = f.singular_values.size() == 0
                            ? 0.0
                            : static_cast<double>(std::max(m.rows(), m.cols())) *
                                  std::numeric_limits<double>::epsilon() *
                                  f.singular_values(0);
  std::size_t rank = 0;
  for (Eigen::Index j = 0; j < f.singular_values.size(); ++j) {
    if (f.singular_values(j) > cutoff) ++rank;
  }
  if (k < 1 || k > rank) {
    throw InvalidArgument("lsa_reduce: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(rank) + "]");
  }
  const auto kk = static_cast<Eigen::Index>(k);
  LsaReduction out;
  out.singular_values = f.singular_values.head(kk);
  out.term_embeddings = f.u.leftCols(kk) * out.singular_values.asDiagonal();
  out.doc_embeddings = f.v.leftCols(kk);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_index(const TermDocumentIndex& ix) {
  const std::string payload = index_payload(ix).dump();
  std::string out;
  out.reserve(payload.size() + 64);
  out += kIndexMagic;
  out += '\n';
  out += payload;
  out += '\n';
  out += checksum_line(payload);
  out += '\n';
  return out;
}

TermDocumentIndex deserialize_index(std::string_view bytes) {
  const auto nl1 = bytes.find('\n');
  if (nl1 == std::string_view::npos || bytes.substr(0, nl1) != kIndexMagic) {
    throw VersionError("not a qsem index (bad magic; expected " +
                       std::string(kIndexMagic) + ")");
  }
  const auto nl2 = bytes.find('\n', nl1 + 1);
  if (nl2 == std::string_view::npos) throw CorruptDataError("index truncated: no payload");
  const std::string_view payload = bytes.substr(nl1 + 1, nl2 - nl1 - 1);
  std::string_view tail = bytes.substr(nl2 + 1);
  if (!tail.empty() && tail.back() == '\n') tail.remove_suffix(1);
  if (tail.rfind("checksum ", 0) != 0) throw CorruptDataError("index truncated: no checksum");
  if (tail != checksum_line(payload)) throw ChecksumError("index checksum mismatch");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptDataError(std::string("index payload: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kIndexVersion) {
      throw VersionError("unsupported index version " + j.at("version").dump());
    }
    const auto weighting = parse_weighting(j.at("weighting").get<std::string>());
    auto vocab = j.at("vocab").get<std::vector<std::string>>();
    auto doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    std::vector<Entry> entries;
    const auto& trip = j.at("triplets");
    entries.reserve(trip.size());
    for (const auto& t : trip) {
      if (!t.is_array() || t.size() != 3) throw CorruptDataError("malformed triplet");
      entries.push_back({t[0].get<std::uint32_t>(), t[1].get<std::uint32_t>(),
                         t[2].get<double>()});
    }
    return TermDocumentIndex(std::move(vocab), std::move(doc_ids), std::move(entries),
                             weighting);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptDataError(std::string("index payload: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptDataError(std::string("index payload: ") + e.what());
  }
}

void save_index(const TermDocumentIndex& ix, const std::filesystem::path& path) {
  textio::write_file(path, serialize_index(ix));
}

TermDocumentIndex load_index(const std::filesystem::path& path) {
  return deserialize_index(textio::read_file(path));
}

}  // namespace qsem::corpus
