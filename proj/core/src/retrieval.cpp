#include "qsem/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <Eigen/Sparse>

#include "qsem/errors.hpp"
#include "qsem/qlogic.hpp"
#include "qsem/textio.hpp"

namespace qsem::retrieval {

namespace {

constexpr double kZeroNorm = 1e-12;

Eigen::SparseMatrix<double> sparse_matrix(const corpus::TermDocumentIndex& ix) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(ix.entries().size());
  for (const auto& e : ix.entries()) {
    trips.emplace_back(static_cast<int>(e.term), static_cast<int>(e.doc), e.weight);
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(ix.num_terms()),
                                static_cast<Eigen::Index>(ix.num_docs()));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace

double cosine(const RealVector& u, const RealVector& v) {
  if (u.size() != v.size()) throw DimensionError("cosine: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw InvalidArgument("cosine: zero vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

QueryAst parse_query(std::string_view q) {
  if (textio::trim(q).empty()) throw ParseError("empty query");
  QueryAst ast;
  bool seen_not = false;
  std::size_t pos = 0;
  while (pos < q.size()) {
    const auto b = q.find_first_not_of(" \t\r\n\f\v", pos);
    if (b == std::string_view::npos) break;
    auto e = q.find_first_of(" \t\r\n\f\v", b);
    if (e == std::string_view::npos) e = q.size();
    const auto raw = q.substr(b, e - b);
    pos = e;
    if (raw == "NOT") {
      if (seen_not) throw ParseError("query has more than one NOT");
      if (ast.positives.empty()) throw ParseError("query has no positive terms before NOT");
      seen_not = true;
      continue;
    }
    for (auto& tok : corpus::tokenize(raw)) {
      (seen_not ? ast.negatives : ast.positives).push_back(std::move(tok));
    }
  }
  if (ast.positives.empty()) throw ParseError("query has no positive terms");
  if (seen_not && ast.negatives.empty()) throw ParseError("NOT must be followed by terms");
  for (const auto& t : ast.negatives) {
    if (std::find(ast.positives.begin(), ast.positives.end(), t) != ast.positives.end()) {
      throw ParseError("term '" + t + "' is both positive and negated");
    }
  }
  return ast;
}

QueryVector build_query_vector(const corpus::TermDocumentIndex& ix, const QueryAst& ast) {
  QueryVector out;
  out.vector = RealVector::Zero(static_cast<Eigen::Index>(ix.num_docs()));
  if (ast.positives.empty()) throw InvalidArgument("query has no positive terms");
  // term_vector throws UnknownTermError for an unknown positive.
  for (const auto& t : ast.positives) out.vector += corpus::term_vector(ix, t);
  const double norm = out.vector.norm();
  if (norm > kZeroNorm) out.vector /= norm;
  for (const auto& t : ast.negatives) {
    if (!ix.term_index(t)) {
      out.warnings.push_back("skipping unknown negated term '" + t + "'");
      continue;
    }
    out.negated_terms.push_back(corpus::term_vector(ix, t));
  }
  out.vector = qlogic::negate_vector<Real>(out.vector, out.negated_terms);
  return out;
}

RealMatrix document_vectors(const corpus::TermDocumentIndex& ix) {
  const auto m = sparse_matrix(ix);
  const Eigen::SparseMatrix<double> g = m.transpose() * m;
  return RealMatrix(g);
}

RankedList rank(std::vector<ScoredDoc> scored, std::size_t top_k) {
  std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (scored.size() > top_k) scored.resize(top_k);
  return scored;
}

SearchResult search(const corpus::TermDocumentIndex& ix, const QueryAst& ast,
                    std::size_t top_k) {
  if (top_k < 1) throw InvalidArgument("search: top_k must be >= 1");
  SearchResult result;
  result.query = build_query_vector(ix, ast);
  const RealVector& q = result.query.vector;
  const double qn = q.norm();
  const RealMatrix docs = document_vectors(ix);
  std::vector<ScoredDoc> scored;
  scored.reserve(ix.num_docs());
  // d_j . q for every j at once; docs is symmetric (M^T M).
  const RealVector dots = docs.transpose() * q;
  for (std::size_t j = 0; j < ix.num_docs(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double dn = docs.col(jj).norm();
    double s = 0.0;
    if (qn > kZeroNorm && dn > kZeroNorm) s = std::clamp(dots(jj) / (qn * dn), -1.0, 1.0);
    scored.push_back({ix.doc_ids()[j], s});
  }
  if (qn <= kZeroNorm) {
    result.query.warnings.push_back("query vector vanished after negation; all scores 0");
  }
  result.ranking = rank(std::move(scored), top_k);
  return result;
}

double average_precision(const RankedList& ranking, const std::set<std::string>& relevant) {
  if (relevant.empty()) throw InvalidArgument("average_precision: empty relevance set");
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    if (relevant.count(ranking[k].doc_id) != 0) {
      hits += 1.0;
      sum += hits / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double map_eval(const std::vector<Run>& runs) {
  if (runs.empty()) throw InvalidArgument("map_eval: no runs");
  double total = 0.0;
  for (const auto& r : runs) total += average_precision(r.ranking, r.relevant);
  return total / static_cast<double>(runs.size());
}

Qrels read_qrels(std::istream& in) {
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (textio::trim(line).empty()) continue;
    const auto fields = textio::split(line, '\t');
    // qid doc | qid doc rel | qid iter doc rel (TREC)
    std::string_view doc;
    double rel = 1.0;
    try {
      if (fields.size() == 2) {
        doc = fields[1];
      } else if (fields.size() == 3) {
        doc = fields[1];
        rel = textio::parse_real(fields[2]);
      } else if (fields.size() == 4) {
        doc = fields[2];
        rel = textio::parse_real(fields[3]);
      } else {
        throw ParseError("bad field count");
      }
    } catch (const ParseError&) {
      throw ParseError("qrels line " + std::to_string(lineno) +
                       ": expected query_id<TAB>doc_id[<TAB>relevance]");
    }
    if (fields[0].empty() || doc.empty()) {
      throw ParseError("qrels line " + std::to_string(lineno) + ": empty field");
    }
    auto& rels = qrels[std::string(fields[0])];
    if (rel > 0.0) rels.insert(std::string(doc));
  }
  return qrels;
}

RunFile read_run(std::istream& in) {
  RunFile run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (textio::trim(line).empty()) continue;
    const auto fields = textio::split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("run line " + std::to_string(lineno) +
                       ": expected query_id<TAB>rank<TAB>doc_id<TAB>score");
    }
    double score = 0.0;
    try {
      score = textio::parse_real(fields[3]);
    } catch (const ParseError& e) {
      throw ParseError("run line " + std::to_string(lineno) + ": " + e.what());
    }
    run[std::string(fields[0])].push_back({std::string(fields[2]), score});
  }
  // Order comes from the scores; the rank column is informational.
  for (auto& [qid, ranking] : run) {
    const auto n = ranking.size();
    ranking = rank(std::move(ranking), n);
  }
  return run;
}

void write_run(std::ostream& out, std::string_view query_id, const RankedList& ranking) {
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    out << query_id << '\t' << (k + 1) << '\t' << ranking[k].doc_id << '\t'
        << textio::format_real(ranking[k].score) << '\n';
  }
}

double evaluate_map(const RunFile& run, const Qrels& qrels) {
  std::vector<Run> runs;
  for (const auto& [qid, relevant] : qrels) {
    if (relevant.empty()) continue;
    const auto it = run.find(qid);
    runs.push_back({it == run.end() ? RankedList{} : it->second, relevant});
  }
  return map_eval(runs);
}

}  // namespace qsem::retrieval
