#pragma once

// Text ingestion, term-document index construction, LSA rank reduction and
// index persistence.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsem/numkernel.hpp"

namespace qsem::corpus {

struct Document {
  std::string id;
  std::vector<std::string> tokens;
};

// Ordered documents with unique ids.
class Corpus {
 public:
  void add(Document doc);

  [[nodiscard]] const std::vector<Document>& docs() const noexcept { return docs_; }
  [[nodiscard]] std::size_t size() const noexcept { return docs_.size(); }
  [[nodiscard]] bool empty() const noexcept { return docs_.empty(); }

 private:
  std::vector<Document> docs_;
  std::set<std::string, std::less<>> ids_;
};

enum class SourceFormat { kDirOfTextFiles, kTabSeparatedLines };

// Splits on Unicode whitespace, strips ASCII punctuation at token edges and
// lowercases ASCII letters. Tokens left empty are discarded.
std::vector<std::string> tokenize(std::string_view text);

// "doc_id<TAB>text" per line.
Corpus ingest_tsv(std::istream& in);

// Directory: one document per regular file, id = file stem, ordered by name.
Corpus ingest(const std::filesystem::path& source, SourceFormat format);

enum class Weighting { kCount, kTfIdf };

std::string_view to_string(Weighting w) noexcept;
Weighting parse_weighting(std::string_view name);

struct Entry {
  std::uint32_t term = 0;
  std::uint32_t doc = 0;
  double weight = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Sparse terms x documents matrix. Vocabulary is sorted; entries are sorted
// by (term, doc) and unique; weights are non-negative.
class TermDocumentIndex {
 public:
  TermDocumentIndex(std::vector<std::string> vocab, std::vector<std::string> doc_ids,
                    std::vector<Entry> entries, Weighting weighting);

  [[nodiscard]] const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  [[nodiscard]] const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
  [[nodiscard]] Weighting weighting() const noexcept { return weighting_; }
  [[nodiscard]] std::size_t num_terms() const noexcept { return vocab_.size(); }
  [[nodiscard]] std::size_t num_docs() const noexcept { return doc_ids_.size(); }

  [[nodiscard]] std::optional<std::size_t> term_index(std::string_view term) const;
  [[nodiscard]] std::optional<std::size_t> doc_index(std::string_view doc_id) const;

  // Entries of one term row, ordered by doc.
  [[nodiscard]] std::span<const Entry> row(std::size_t term) const;

  [[nodiscard]] RealMatrix dense() const;

  friend bool operator==(const TermDocumentIndex&, const TermDocumentIndex&);

 private:
  std::vector<std::string> vocab_;
  std::vector<std::string> doc_ids_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> row_offsets_;
  Weighting weighting_;
};

// Count: raw tf. TfIdf: tf * ln(N / df). Terms with df < min_df are dropped.
TermDocumentIndex build_index(const Corpus& c, Weighting weighting,
                              std::size_t min_df = 1);

// Row of the index (length = number of documents).
RealVector term_vector(const TermDocumentIndex& ix, std::string_view term);

struct LsaReduction {
  RealMatrix term_embeddings;       // terms x k, U_k * Sigma_k
  RealMatrix doc_embeddings;        // docs x k, V_k
  Eigen::VectorXd singular_values;  // k, descending

  [[nodiscard]] RealMatrix reconstruct() const {
    return term_embeddings * doc_embeddings.transpose();
  }
};

std::size_t numerical_rank(const RealMatrix& m);

// Truncated SVD; 1 <= k <= rank.
LsaReduction lsa_reduce(const TermDocumentIndex& ix, std::size_t k);

inline constexpr std::string_view kIndexMagic = "QSEMIDX1";
inline constexpr int kIndexVersion = 1;

std::string serialize_index(const TermDocumentIndex& ix);
TermDocumentIndex deserialize_index(std::string_view bytes);

void save_index(const TermDocumentIndex& ix, const std::filesystem::path& path);
TermDocumentIndex load_index(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace qsem::corpus
