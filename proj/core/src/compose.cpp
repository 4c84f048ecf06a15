#include "qsem/compose.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <random>
#include <string_view>

#include <unsupported/Eigen/FFT>

#include "qsem/corpus.hpp"
#include "qsem/errors.hpp"
#include "qsem/textio.hpp"

namespace qsem::compose {

namespace {

constexpr double kUnitModulusTol = 1e-10;

template <Field F>
void require_same_shape(const Order2Tensor<F>& s, const Order2Tensor<F>& t, const char* op) {
  if (s.entries.rows() != t.entries.rows() || s.entries.cols() != t.entries.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}

template <Field F>
void require_unit_modulus(const Vector<F>& v, const char* op) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(std::abs(v(k)) - 1.0) > kUnitModulusTol) {
      throw InvalidArgument(std::string(op) +
                            ": PhaseAddition needs unit-modulus coordinates");
    }
  }
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::string_view name, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(corpus::fnv1a64(name)),
                    static_cast<std::uint32_t>(corpus::fnv1a64(name) >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

std::vector<std::array<std::string, 3>> read_three_columns(std::istream& in,
                                                          const char* what) {
  std::vector<std::array<std::string, 3>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (textio::trim(line).empty() || line.front() == '#') continue;
    const auto f = textio::split(line, '\t');
    if (f.size() != 3 || textio::trim(f[0]).empty() || textio::trim(f[1]).empty() ||
        textio::trim(f[2]).empty()) {
      throw ParseError(std::string(what) + " line " + std::to_string(lineno) +
                       ": expected three TAB-separated fields");
    }
    rows.push_back({std::string(textio::trim(f[0])), std::string(textio::trim(f[1])),
                    std::string(textio::trim(f[2]))});
  }
  return rows;
}

std::vector<Complex> to_complex(const RealVector& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<Complex> to_complex(const ComplexVector& v) {
  return {v.data(), v.data() + v.size()};
}

template <Field F>
Vector<F> from_complex(const std::vector<Complex>& x) {
  Vector<F> out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) {
    if constexpr (std::same_as<F, Real>) {
      out(static_cast<Eigen::Index>(k)) = x[k].real();
    } else {
      out(static_cast<Eigen::Index>(k)) = x[k];
    }
  }
  return out;
}

}  // namespace

template <Field F>
Order2Tensor<F> tensor(const Vector<F>& u, const Vector<F>& v) {
  return {u * v.transpose()};
}

template <Field F>
F tensor_inner(const Order2Tensor<F>& s, const Order2Tensor<F>& t) {
  require_same_shape(s, t, "tensor_inner");
  return s.entries.conjugate().cwiseProduct(t.entries).sum();
}

template <Field F>
Separability<F> is_separable(const Order2Tensor<F>& t, double tol) {
  if (t.entries.size() == 0 || t.entries.norm() == 0.0) {
    throw DegenerateTensorError("is_separable: zero tensor");
  }
  const auto f = svd<F>(t.entries);
  Separability<F> out;
  out.singular_values = f.singular_values;
  const double s1 = f.singular_values(0);
  out.ratio = f.singular_values.size() > 1 ? f.singular_values(1) / s1 : 0.0;
  out.separable = out.ratio <= tol;
  if (out.separable) {
    const double root = std::sqrt(s1);
    Vector<F> u = root * f.u.col(0);
    Vector<F> v = root * f.v.col(0).conjugate();
    out.factors = std::make_pair(std::move(u), std::move(v));
  }
  return out;
}

template <Field F>
Order2Tensor<F> verb_tensor(std::span<const NounPair> pairs,
                            const std::map<std::string, Vector<F>>& nouns) {
  if (pairs.empty()) throw InvalidArgument("verb_tensor: no (subject, object) pairs");
  std::optional<Order2Tensor<F>> acc;
  for (const auto& [subj, obj] : pairs) {
    const auto s = nouns.find(subj);
    if (s == nouns.end()) throw UnknownTermError(subj);
    const auto o = nouns.find(obj);
    if (o == nouns.end()) throw UnknownTermError(obj);
    auto t = tensor<F>(s->second, o->second);
    if (!acc) {
      acc = std::move(t);
    } else {
      require_same_shape(*acc, t, "verb_tensor");
      acc->entries += t.entries;
    }
  }
  return *acc;
}

template <Field F>
Order2Tensor<F> compose_sentence(const Vector<F>& subj, const Order2Tensor<F>& verb,
                                 const Vector<F>& obj) {
  auto t = tensor<F>(subj, obj);
  require_same_shape(t, verb, "compose_sentence");
  t.entries = t.entries.cwiseProduct(verb.entries);
  return t;
}

template <Field F>
double sentence_similarity(const Order2Tensor<F>& s, const Order2Tensor<F>& t) {
  const double ns = s.norm();
  const double nt = t.norm();
  if (ns == 0.0 || nt == 0.0) throw InvalidArgument("sentence_similarity: zero tensor");
  return std::real(tensor_inner(s, t)) / (ns * nt);
}

template <Field F>
Vector<F> bind(const Vector<F>& a, const Vector<F>& b, BindMode mode) {
  if (a.size() != b.size()) throw DimensionError("bind: dimension mismatch");
  if (mode == BindMode::kPhaseAddition) {
    if constexpr (std::same_as<F, Real>) {
      throw InvalidArgument("bind: PhaseAddition requires the Complex field");
    } else {
      require_unit_modulus<F>(a, "bind");
      require_unit_modulus<F>(b, "bind");
      return a.cwiseProduct(b);
    }
  }
  const Eigen::Index n = a.size();
  Vector<F> c = Vector<F>::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    F acc{};
    for (Eigen::Index j = 0; j < n; ++j) acc += a(j) * b(((k - j) % n + n) % n);
    c(k) = acc;
  }
  return c;
}

template <Field F>
Vector<F> unbind(const Vector<F>& c, const Vector<F>& a, BindMode mode) {
  if (a.size() != c.size()) throw DimensionError("unbind: dimension mismatch");
  if (mode == BindMode::kPhaseAddition) {
    if constexpr (std::same_as<F, Real>) {
      throw InvalidArgument("unbind: PhaseAddition requires the Complex field");
    } else {
      require_unit_modulus<F>(a, "unbind");
      return c.cwiseProduct(a.conjugate());
    }
  }
  const Eigen::Index n = a.size();
  Vector<F> u = Vector<F>::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    F acc{};
    for (Eigen::Index j = 0; j < n; ++j) acc += conj(a(j)) * c((j + k) % n);
    u(k) = acc;
  }
  return u;
}

template <Field F>
Vector<F> bind_fft(const Vector<F>& a, const Vector<F>& b) {
  if (a.size() != b.size()) throw DimensionError("bind_fft: dimension mismatch");
  // Eigen's kissfft backend crashes on length-1 transforms.
  if (a.size() < 2) return bind<F>(a, b, BindMode::kCircularConvolution);
  Eigen::FFT<double> fft;
  std::vector<Complex> fa, fb, out;
  fft.fwd(fa, to_complex(a));
  fft.fwd(fb, to_complex(b));
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.inv(out, fa);
  return from_complex<F>(out);
}

template <Field F>
Vector<F> unbind_fft(const Vector<F>& c, const Vector<F>& a) {
  if (a.size() != c.size()) throw DimensionError("unbind_fft: dimension mismatch");
  if (a.size() < 2) return unbind<F>(c, a, BindMode::kCircularConvolution);
  Eigen::FFT<double> fft;
  std::vector<Complex> fa, fc, out;
  fft.fwd(fa, to_complex(a));
  fft.fwd(fc, to_complex(c));
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] = std::conj(fa[k]) * fc[k];
  fft.inv(out, fa);
  return from_complex<F>(out);
}

template <Field F>
double cosine_similarity(const Vector<F>& u, const Vector<F>& v) {
  if (u.size() != v.size()) throw DimensionError("cosine_similarity: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw InvalidArgument("cosine_similarity: zero vector");
  return std::real(inner<F>(u, v)) / (nu * nv);
}

ComplexVector random_vector(std::size_t dim, std::uint64_t seed, std::string_view name,
                            BindMode mode) {
  if (dim == 0) throw InvalidArgument("random_vector: dim must be > 0");
  auto rng = seeded_engine(seed, name, mode == BindMode::kPhaseAddition ? 1 : 2);
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexVector v(n);
  if (mode == BindMode::kPhaseAddition) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = std::polar(1.0, phase(rng));
    return v;
  }
  std::normal_distribution<double> g(0.0, 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = g(rng);
    const double im = g(rng);
    v(k) = Complex(re, im);
  }
  return v / v.norm();
}

RealVector random_real_unit_vector(std::size_t dim, std::uint64_t seed,
                                   std::string_view name) {
  if (dim == 0) throw InvalidArgument("random_real_unit_vector: dim must be > 0");
  auto rng = seeded_engine(seed, name, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  RealVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = g(rng);
  return v / v.norm();
}

RelationStore::RelationStore(std::size_t dim, std::uint64_t seed, BindMode mode)
    : dim_(dim), seed_(seed), mode_(mode) {
  if (dim == 0) throw InvalidArgument("RelationStore: dim must be > 0");
}

ComplexVector RelationStore::concept_vector(const std::string& name) const {
  const auto it = semantic_.find(name);
  if (it == semantic_.end()) return ComplexVector::Zero(static_cast<Eigen::Index>(dim_));
  return it->second;
}

const ComplexVector& RelationStore::ensure_concept(const std::string& name) {
  if (relations_.count(name) != 0) {
    throw InvalidArgument("'" + name + "' is already a relation name");
  }
  auto it = concepts_.find(name);
  if (it == concepts_.end()) {
    it = concepts_.emplace(name, random_vector(dim_, seed_, "concept:" + name, mode_)).first;
  }
  return it->second;
}

const ComplexVector& RelationStore::ensure_relation(const std::string& name) {
  if (concepts_.count(name) != 0) {
    throw InvalidArgument("'" + name + "' is already a concept name");
  }
  auto it = relations_.find(name);
  if (it == relations_.end()) {
    it = relations_.emplace(name, random_vector(dim_, seed_, "relation:" + name, mode_)).first;
  }
  return it->second;
}

void RelationStore::add_to_semantic(const std::string& name, const ComplexVector& v) {
  if (static_cast<std::size_t>(v.size()) != dim_) {
    throw DimensionError("RelationStore: vector dimension mismatch");
  }
  auto [it, inserted] = semantic_.try_emplace(name, ComplexVector::Zero(v.size()));
  it->second += v;
}

RelationStore psi_encode(RelationStore store, std::span<const Fact> facts) {
  for (const auto& f : facts) {
    store.ensure_concept(f.concept_name);
    const ComplexVector rel = store.ensure_relation(f.relation);
    const ComplexVector filler = store.ensure_concept(f.filler);
    store.add_to_semantic(f.concept_name, bind<Complex>(rel, filler, store.mode()));
  }
  return store;
}

ComplexVector psi_query(const RelationStore& store, const std::string& concept_name,
                        const std::string& relation) {
  const auto rel = store.relations().find(relation);
  if (rel == store.relations().end()) throw UnknownTermError(relation);
  if (store.elemental_concepts().count(concept_name) == 0) {
    throw UnknownTermError(concept_name);
  }
  return unbind<Complex>(store.concept_vector(concept_name), rel->second, store.mode());
}

std::pair<std::string, double> nearest_concept(const RelationStore& store,
                                               const ComplexVector& probe) {
  if (store.elemental_concepts().empty()) {
    throw InvalidArgument("nearest_concept: store has no concepts");
  }
  std::pair<std::string, double> best{"", -2.0};
  // std::map iteration is name-ordered, so the first maximum wins ties.
  for (const auto& [name, v] : store.elemental_concepts()) {
    const double c = cosine_similarity<Complex>(probe, v);
    if (c > best.second) best = {name, c};
  }
  return best;
}

std::vector<Triple> read_triples(std::istream& in) {
  std::vector<Triple> out;
  for (auto& r : read_three_columns(in, "triples")) {
    out.push_back({std::move(r[0]), std::move(r[1]), std::move(r[2])});
  }
  return out;
}

std::vector<Fact> read_facts(std::istream& in) {
  std::vector<Fact> out;
  for (auto& r : read_three_columns(in, "facts")) {
    out.push_back({std::move(r[0]), std::move(r[1]), std::move(r[2])});
  }
  return out;
}

std::vector<NounPair> pairs_for_verb(std::span<const Triple> triples, std::string_view verb) {
  std::vector<NounPair> out;
  for (const auto& t : triples) {
    if (t.verb == verb) out.emplace_back(t.subject, t.object);
  }
  return out;
}

#define QSEM_INSTANTIATE(F)                                                              \
  template Order2Tensor<F> tensor<F>(const Vector<F>&, const Vector<F>&);                \
  template F tensor_inner<F>(const Order2Tensor<F>&, const Order2Tensor<F>&);            \
  template Separability<F> is_separable<F>(const Order2Tensor<F>&, double);              \
  template Order2Tensor<F> verb_tensor<F>(std::span<const NounPair>,                     \
                                          const std::map<std::string, Vector<F>>&);      \
  template Order2Tensor<F> compose_sentence<F>(const Vector<F>&, const Order2Tensor<F>&, \
                                               const Vector<F>&);                        \
  template double sentence_similarity<F>(const Order2Tensor<F>&, const Order2Tensor<F>&);\
  template Vector<F> bind<F>(const Vector<F>&, const Vector<F>&, BindMode);              \
  template Vector<F> unbind<F>(const Vector<F>&, const Vector<F>&, BindMode);            \
  template Vector<F> bind_fft<F>(const Vector<F>&, const Vector<F>&);                    \
  template Vector<F> unbind_fft<F>(const Vector<F>&, const Vector<F>&);                  \
  template double cosine_similarity<F>(const Vector<F>&, const Vector<F>&);

QSEM_INSTANTIATE(Real)
QSEM_INSTANTIATE(Complex)

#undef QSEM_INSTANTIATE

}  // namespace qsem::compose
