#pragma once

// Cosine ranking with orthogonal negation, query parsing and MAP.
//
// Queries, term vectors and documents all live in document space (one
// coordinate per indexed document). A term vector is its index row; a
// document j is the sum of its terms' vectors weighted by column j,
// d_j = sum_t M[t, j] * row_t. Negated terms are removed from the query by
// projecting onto the orthogonal complement of their span.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qsem/corpus.hpp"
#include "qsem/numkernel.hpp"

namespace qsem::retrieval {

struct QueryAst {
  std::vector<std::string> positives;
  std::vector<std::string> negatives;

  friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

// Scores non-increasing, ties by doc_id ascending, no duplicate ids.
using RankedList = std::vector<ScoredDoc>;

double cosine(const RealVector& u, const RealVector& v);

// query := term+ ("NOT" term+)?
QueryAst parse_query(std::string_view q);

struct QueryVector {
  RealVector vector;                       // unit norm unless fully negated
  std::vector<RealVector> negated_terms;   // vectors of known negatives
  std::vector<std::string> warnings;
};

QueryVector build_query_vector(const corpus::TermDocumentIndex& ix,
                               const QueryAst& ast);

// Column j is d_j.
RealMatrix document_vectors(const corpus::TermDocumentIndex& ix);

struct SearchResult {
  RankedList ranking;
  QueryVector query;
};

SearchResult search(const corpus::TermDocumentIndex& ix, const QueryAst& ast,
                    std::size_t top_k);

// Orders (doc_id, score) pairs by the RankedList rule and truncates.
RankedList rank(std::vector<ScoredDoc> scored, std::size_t top_k);

struct Run {
  RankedList ranking;
  std::set<std::string> relevant;
};

double average_precision(const RankedList& ranking,
                         const std::set<std::string>& relevant);
double map_eval(const std::vector<Run>& runs);

using Qrels = std::map<std::string, std::set<std::string>>;
using RunFile = std::map<std::string, RankedList>;

// "query_id<TAB>doc_id" per line.
Qrels read_qrels(std::istream& in);
// "query_id<TAB>rank<TAB>doc_id<TAB>score" per line.
RunFile read_run(std::istream& in);
void write_run(std::ostream& out, std::string_view query_id,
               const RankedList& ranking);

// MAP over the qrels queries with at least one relevant document; a query
// absent from the run has AP 0.
double evaluate_map(const RunFile& run, const Qrels& qrels);

}  // namespace qsem::retrieval
