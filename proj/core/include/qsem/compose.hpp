#pragma once

// Tensor-product composition and vector-symbolic binding.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsem/numkernel.hpp"

namespace qsem::compose {

// Element of U (x) V stored as an m x n coefficient matrix.
template <Field F>
struct Order2Tensor {
  Matrix<F> entries;

  [[nodiscard]] std::size_t first_dim() const noexcept {
    return static_cast<std::size_t>(entries.rows());
  }
  [[nodiscard]] std::size_t second_dim() const noexcept {
    return static_cast<std::size_t>(entries.cols());
  }
  [[nodiscard]] double norm() const { return entries.norm(); }
};

// entries(i, j) = u_i v_j (no conjugation).
template <Field F>
Order2Tensor<F> tensor(const Vector<F>& u, const Vector<F>& v);

// Frobenius inner product sum conj(S_ij) T_ij.
template <Field F>
F tensor_inner(const Order2Tensor<F>& s, const Order2Tensor<F>& t);

template <Field F>
struct Separability {
  bool separable = false;
  double ratio = 0.0;  // sigma_2 / sigma_1 (0 for a single singular value)
  Eigen::VectorXd singular_values;
  std::optional<std::pair<Vector<F>, Vector<F>>> factors;
};

// Separable iff sigma_2 / sigma_1 <= tol. Throws DegenerateTensorError for
// the zero tensor.
template <Field F>
Separability<F> is_separable(const Order2Tensor<F>& t, double tol = 1e-8);

using NounPair = std::pair<std::string, std::string>;

// Sum over (subject, object) pairs of tensor(subject, object).
template <Field F>
Order2Tensor<F> verb_tensor(std::span<const NounPair> pairs,
                            const std::map<std::string, Vector<F>>& nouns);

// tensor(subj, obj) multiplied elementwise by the verb tensor.
template <Field F>
Order2Tensor<F> compose_sentence(const Vector<F>& subj, const Order2Tensor<F>& verb,
                                 const Vector<F>& obj);

// Re<S, T> / (|S| |T|).
template <Field F>
double sentence_similarity(const Order2Tensor<F>& s, const Order2Tensor<F>& t);

enum class BindMode { kCircularConvolution, kPhaseAddition };

// CircularConvolution: c_k = sum_j a_j b_{(k - j) mod n}, computed directly.
// PhaseAddition: c_k = a_k b_k on unit-modulus coordinates (Complex only).
template <Field F>
Vector<F> bind(const Vector<F>& a, const Vector<F>& b, BindMode mode);

// CircularConvolution: circular correlation u_k = sum_j conj(a_j) c_{(j + k) mod n}.
// PhaseAddition: c_k conj(a_k), the exact inverse.
template <Field F>
Vector<F> unbind(const Vector<F>& c, const Vector<F>& a, BindMode mode);

// FFT versions of the circular convolution and correlation.
template <Field F>
Vector<F> bind_fft(const Vector<F>& a, const Vector<F>& b);
template <Field F>
Vector<F> unbind_fft(const Vector<F>& c, const Vector<F>& a);

// Re<u, v> / (|u| |v|).
template <Field F>
double cosine_similarity(const Vector<F>& u, const Vector<F>& v);

// Seeded elemental vectors. PhaseAddition: unit-modulus coordinates with
// uniform phases. CircularConvolution: Gaussian, normalised to unit length.
// A vector depends only on (seed, name, dim, mode).
ComplexVector random_vector(std::size_t dim, std::uint64_t seed, std::string_view name,
                            BindMode mode);
RealVector random_real_unit_vector(std::size_t dim, std::uint64_t seed,
                                   std::string_view name);

struct Fact {
  std::string concept_name;
  std::string relation;
  std::string filler;
};

// Concept names and relation names live in disjoint namespaces. Each name
// has a seeded elemental vector; concepts also carry a semantic vector that
// accumulates bound (relation, filler) products.
class RelationStore {
 public:
  RelationStore(std::size_t dim, std::uint64_t seed,
                BindMode mode = BindMode::kPhaseAddition);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] BindMode mode() const noexcept { return mode_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  // Zero vector for a concept with no facts.
  [[nodiscard]] ComplexVector concept_vector(const std::string& name) const;
  [[nodiscard]] const std::map<std::string, ComplexVector>& elemental_concepts() const noexcept {
    return concepts_;
  }
  [[nodiscard]] const std::map<std::string, ComplexVector>& relations() const noexcept {
    return relations_;
  }

  const ComplexVector& ensure_concept(const std::string& name);
  const ComplexVector& ensure_relation(const std::string& name);
  void add_to_semantic(const std::string& name, const ComplexVector& v);

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  BindMode mode_;
  std::map<std::string, ComplexVector> concepts_;
  std::map<std::string, ComplexVector> relations_;
  std::map<std::string, ComplexVector> semantic_;
};

// concept += bind(relation, filler) for each fact.
RelationStore psi_encode(RelationStore store, std::span<const Fact> facts);

// unbind(semantic(concept), relation).
ComplexVector psi_query(const RelationStore& store, const std::string& concept_name,
                        const std::string& relation);

// Nearest elemental concept vector by cosine; ties broken by name.
std::pair<std::string, double> nearest_concept(const RelationStore& store,
                                               const ComplexVector& probe);

struct Triple {
  std::string subject;
  std::string verb;
  std::string object;
};

// "subject<TAB>verb<TAB>object" per line.
std::vector<Triple> read_triples(std::istream& in);
// "concept<TAB>RELATION<TAB>filler" per line.
std::vector<Fact> read_facts(std::istream& in);

// (subject, object) pairs of the triples whose verb matches.
std::vector<NounPair> pairs_for_verb(std::span<const Triple> triples, std::string_view verb);

}  // namespace qsem::compose
