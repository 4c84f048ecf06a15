#pragma once

// Quantum language model: phrase-superposition projectors, iterative
// maximum-likelihood density estimation, smoothing and divergence ranking.
//
// Densities live on the support of the observed terms rather than on the
// whole vocabulary. Models with different supports are compared after
// embedding both into the union support (by term name).

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsem/corpus.hpp"
#include "qsem/density.hpp"
#include "qsem/numkernel.hpp"

namespace qsem::qlm {

struct WeightedTerm {
  std::string term;
  double weight = 1.0;

  friend bool operator==(const WeightedTerm&, const WeightedTerm&) = default;
};

// Rank-1 projector |v><v| with v = normalize(sum_i w_i e_{t_i}), stored
// sparsely as (vocabulary index, coefficient) pairs sorted by index.
class TermProjector {
 public:
  TermProjector(std::vector<std::pair<std::size_t, double>> components,
                std::vector<std::string> names, std::vector<WeightedTerm> terms);

  [[nodiscard]] const std::vector<std::pair<std::size_t, double>>& components() const noexcept {
    return components_;
  }
  // names()[k] is the term at components()[k].
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] const std::vector<WeightedTerm>& terms() const noexcept { return terms_; }

  [[nodiscard]] RealVector vector(std::size_t vocab_size) const;
  [[nodiscard]] RealMatrix dense(std::size_t vocab_size) const;

 private:
  std::vector<std::pair<std::size_t, double>> components_;
  std::vector<std::string> names_;
  std::vector<WeightedTerm> terms_;
};

TermProjector phrase_projector(std::span<const WeightedTerm> terms,
                               std::span<const std::string> vocab);

struct Observation {
  TermProjector projector;
  double weight = 1.0;  // multiplicity
};

struct QlmModel {
  std::string label;
  std::vector<std::string> support;  // sorted term names
  density::DensityMatrix<Real> rho;  // over support
  std::vector<double> log_likelihood_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

// Called with every accepted iterate (the initial state included).
using IterateObserver = std::function<void(const RealMatrix&, double log_likelihood)>;

// Diluted fixed-point iteration rho <- (I + eR) rho (I + eR) / tr with
// R = sum_i (w_i / W) Pi_i / tr(rho Pi_i), starting from the maximally mixed
// state on the observed support. e starts at 1 and is halved until the
// log-likelihood L = sum_i w_i ln tr(rho Pi_i) does not decrease. Stops when
// the relative gain (dL / max(1, |L|)) drops below tol, or after max_iters.
QlmModel estimate_rho(std::span<const Observation> observations, std::size_t max_iters,
                      double tol, const IterateObserver& observer = {});

QlmModel estimate_rho(std::span<const TermProjector> observations, std::size_t max_iters,
                      double tol);

double log_likelihood(const RealMatrix& rho, std::span<const RealVector> vectors,
                      std::span<const double> weights);

// (1 - lambda) rho_d + lambda rho_coll.
density::DensityMatrix<Real> smooth(const density::DensityMatrix<Real>& rho_d,
                                    const density::DensityMatrix<Real>& rho_coll,
                                    double lambda);

// Quantum relative entropy tr(rho_q (log rho_q - log rho_d)) with an
// eigenvalue floor inside the logarithms and 0 log 0 = 0.
double divergence_rank(const density::DensityMatrix<Real>& rho_q,
                       const density::DensityMatrix<Real>& rho_d,
                       double floor = 1e-12);

std::vector<std::string> union_support(std::span<const QlmModel* const> models);

// Zero-pads rho onto a superset support.
density::DensityMatrix<Real> embed(const QlmModel& model,
                                   std::span<const std::string> support);

struct RankedModel {
  std::string label;
  double divergence = 0.0;
};

// Smooths each document model with the mean of all document models and
// sorts by ascending divergence from the query (ties by label).
std::vector<RankedModel> rank_models(const QlmModel& query,
                                     std::span<const QlmModel> docs, double lambda,
                                     double floor = 1e-12);

// One phrase per line: whitespace-separated "term" or "term:weight".
std::vector<std::vector<WeightedTerm>> read_phrases(std::istream& in);

struct ObservationSet {
  std::vector<Observation> observations;
  std::vector<std::string> warnings;
};

// One unigram observation per term of the document, weighted by its index
// weight, plus every phrase whose terms all occur in the document (weight =
// the smallest of those term weights).
ObservationSet document_observations(const corpus::TermDocumentIndex& ix,
                                     std::string_view doc_id,
                                     std::span<const std::vector<WeightedTerm>> phrases);

// Same rule for free text, with token counts as weights.
ObservationSet text_observations(const corpus::TermDocumentIndex& ix,
                                 std::span<const std::string> tokens,
                                 std::span<const std::vector<WeightedTerm>> phrases);

std::string serialize_model(const QlmModel& model);
QlmModel deserialize_model(std::string_view text);
void save_model(const QlmModel& model, const std::filesystem::path& path);
QlmModel load_model(const std::filesystem::path& path);

}  // namespace qsem::qlm
