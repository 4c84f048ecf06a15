#include "qsem/qlm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qsem/errors.hpp"
#include "qsem/textio.hpp"

namespace qsem::qlm {

namespace {

constexpr int kModelVersion = 1;
constexpr double kMinDilution = 0x1p-40;

std::optional<std::size_t> lookup(std::span<const std::string> vocab, std::string_view t) {
  if (std::is_sorted(vocab.begin(), vocab.end())) {
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), t);
    if (it != vocab.end() && *it == t) return static_cast<std::size_t>(it - vocab.begin());
    return std::nullopt;
  }
  const auto it = std::find(vocab.begin(), vocab.end(), t);
  if (it == vocab.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vocab.begin());
}

RealMatrix symmetrize(const RealMatrix& m) { return (m + m.transpose()) / 2.0; }

// Observations projected onto the support basis.
struct SupportProblem {
  std::vector<std::string> support;
  std::vector<RealVector> vectors;
  std::vector<double> weights;  // normalised to sum 1
};

SupportProblem restrict_to_support(std::span<const Observation> observations) {
  std::map<std::string, std::size_t> pos;
  for (const auto& obs : observations) {
    for (const auto& name : obs.projector.names()) pos.emplace(name, 0);
  }
  SupportProblem p;
  for (auto& [name, k] : pos) {
    k = p.support.size();
    p.support.push_back(name);
  }
  const auto dim = static_cast<Eigen::Index>(p.support.size());
  double total = 0.0;
  for (const auto& obs : observations) {
    if (!(obs.weight > 0.0) || !std::isfinite(obs.weight)) {
      throw InvalidArgument("estimate_rho: observation weights must be positive");
    }
    RealVector v = RealVector::Zero(dim);
    const auto& comps = obs.projector.components();
    const auto& names = obs.projector.names();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      v(static_cast<Eigen::Index>(pos.at(names[k]))) = comps[k].second;
    }
    p.vectors.push_back(std::move(v));
    p.weights.push_back(obs.weight);
    total += obs.weight;
  }
  for (auto& w : p.weights) w /= total;
  return p;
}

// log rho with eigenvalues clamped from below at floor.
RealMatrix floored_log(const RealMatrix& rho, double floor) {
  const auto eig = hermitian_eig<Real>(rho, tol::kResidual);
  Eigen::VectorXd logs(eig.values.size());
  for (Eigen::Index k = 0; k < logs.size(); ++k) {
    logs(k) = std::log(std::max(eig.values(k), floor));
  }
  return eig.vectors * logs.asDiagonal() * eig.vectors.transpose();
}

}  // namespace

TermProjector::TermProjector(std::vector<std::pair<std::size_t, double>> components,
                             std::vector<std::string> names,
                             std::vector<WeightedTerm> terms)
    : components_(std::move(components)), names_(std::move(names)), terms_(std::move(terms)) {
  if (components_.empty() || components_.size() != names_.size()) {
    throw InvalidArgument("TermProjector: components and names must match and be non-empty");
  }
  double norm2 = 0.0;
  for (const auto& [idx, c] : components_) norm2 += c * c;
  if (std::abs(norm2 - 1.0) > tol::kOrthonormal) {
    throw InvalidArgument("TermProjector: vector is not unit norm");
  }
}

RealVector TermProjector::vector(std::size_t vocab_size) const {
  RealVector v = RealVector::Zero(static_cast<Eigen::Index>(vocab_size));
  for (const auto& [idx, c] : components_) {
    if (idx >= vocab_size) throw DimensionError("TermProjector: index outside vocabulary");
    v(static_cast<Eigen::Index>(idx)) = c;
  }
  return v;
}

RealMatrix TermProjector::dense(std::size_t vocab_size) const {
  const RealVector v = vector(vocab_size);
  return outer<Real>(v, v);
}

TermProjector phrase_projector(std::span<const WeightedTerm> terms,
                               std::span<const std::string> vocab) {
  if (terms.empty()) throw InvalidArgument("phrase_projector: no terms");
  std::map<std::size_t, double> coeffs;
  for (const auto& wt : terms) {
    if (!(wt.weight > 0.0) || !std::isfinite(wt.weight)) {
      throw InvalidArgument("phrase_projector: weights must be positive");
    }
    const auto idx = lookup(vocab, wt.term);
    if (!idx) throw UnknownTermError(wt.term);
    coeffs[*idx] += wt.weight;
  }
  double norm2 = 0.0;
  for (const auto& [idx, c] : coeffs) norm2 += c * c;
  const double norm = std::sqrt(norm2);
  std::vector<std::pair<std::size_t, double>> comps;
  std::vector<std::string> names;
  for (const auto& [idx, c] : coeffs) {
    comps.emplace_back(idx, c / norm);
    names.push_back(vocab[idx]);
  }
  return TermProjector(std::move(comps), std::move(names),
                       std::vector<WeightedTerm>(terms.begin(), terms.end()));
}

double log_likelihood(const RealMatrix& rho, std::span<const RealVector> vectors,
                      std::span<const double> weights) {
  double l = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const double p = vectors[i].dot(rho * vectors[i]);
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    l += weights[i] * std::log(p);
  }
  return l;
}

QlmModel estimate_rho(std::span<const Observation> observations, std::size_t max_iters,
                      double tol, const IterateObserver& observer) {
  if (observations.empty()) throw InvalidArgument("estimate_rho: no observations");
  if (max_iters < 1) throw InvalidArgument("estimate_rho: max_iters must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("estimate_rho: tol must be > 0");

  const SupportProblem p = restrict_to_support(observations);
  const auto dim = static_cast<Eigen::Index>(p.support.size());
  const double scale = [&] {
    double s = 0.0;
    for (const auto& obs : observations) s += obs.weight;
    return s;
  }();
  const RealMatrix eye = RealMatrix::Identity(dim, dim);

  RealMatrix rho = eye / static_cast<double>(dim);
  double l = log_likelihood(rho, p.vectors, p.weights);
  if (!std::isfinite(l)) {
    throw NumericError("estimate_rho: observation with zero initial probability");
  }
  QlmModel model{"", p.support, density::DensityMatrix<Real>(rho), {l * scale}, 0, false};
  if (observer) observer(rho, l * scale);

  for (std::size_t it = 0; it < max_iters; ++it) {
    RealMatrix r = RealMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < p.vectors.size(); ++i) {
      const double prob = p.vectors[i].dot(rho * p.vectors[i]);
      r += (p.weights[i] / prob) * outer<Real>(p.vectors[i], p.vectors[i]);
    }
    bool accepted = false;
    RealMatrix next;
    double l_next = l;
    for (double eps = 1.0; eps >= kMinDilution; eps /= 2.0) {
      const RealMatrix t = eye + eps * r;
      RealMatrix cand = symmetrize(t * rho * t);
      cand /= cand.trace();
      const double l_cand = log_likelihood(cand, p.vectors, p.weights);
      if (l_cand >= l) {
        next = std::move(cand);
        l_next = l_cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      model.converged = true;
      break;
    }
    const double gain = (l_next - l) / std::max(1.0, std::abs(l));
    rho = std::move(next);
    l = l_next;
    model.iterations = it + 1;
    model.log_likelihood_trace.push_back(l * scale);
    if (observer) observer(rho, l * scale);
    if (gain < tol) {
      model.converged = true;
      break;
    }
  }
  model.rho = density::DensityMatrix<Real>(rho, tol::kRank);
  return model;
}

QlmModel estimate_rho(std::span<const TermProjector> observations, std::size_t max_iters,
                      double tol) {
  std::vector<Observation> obs;
  obs.reserve(observations.size());
  for (const auto& tp : observations) obs.push_back({tp, 1.0});
  return estimate_rho(obs, max_iters, tol);
}

density::DensityMatrix<Real> smooth(const density::DensityMatrix<Real>& rho_d,
                                    const density::DensityMatrix<Real>& rho_coll,
                                    double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("smooth: lambda must lie in [0, 1]");
  }
  if (rho_d.dim() != rho_coll.dim()) throw DimensionError("smooth: dimension mismatch");
  return density::DensityMatrix<Real>((1.0 - lambda) * rho_d.matrix() +
                                      lambda * rho_coll.matrix());
}

double divergence_rank(const density::DensityMatrix<Real>& rho_q,
                       const density::DensityMatrix<Real>& rho_d, double floor) {
  if (rho_q.dim() != rho_d.dim()) throw DimensionError("divergence_rank: dimension mismatch");
  if (!(floor > 0.0)) throw InvalidArgument("divergence_rank: floor must be > 0");
  const auto eq = hermitian_eig<Real>(rho_q.matrix(), tol::kResidual);
  double self = 0.0;
  for (Eigen::Index k = 0; k < eq.values.size(); ++k) {
    const double lam = eq.values(k);
    if (lam > floor) self += lam * std::log(lam);
  }
  const double cross = (rho_q.matrix() * floored_log(rho_d.matrix(), floor)).trace();
  return self - cross;
}

std::vector<std::string> union_support(std::span<const QlmModel* const> models) {
  std::vector<std::string> out;
  for (const auto* m : models) out.insert(out.end(), m->support.begin(), m->support.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

density::DensityMatrix<Real> embed(const QlmModel& model,
                                   std::span<const std::string> support) {
  const auto n = static_cast<Eigen::Index>(support.size());
  std::vector<Eigen::Index> where;
  for (const auto& t : model.support) {
    const auto it = std::lower_bound(support.begin(), support.end(), t);
    if (it == support.end() || *it != t) {
      throw DimensionError("embed: target support lacks term '" + t + "'");
    }
    where.push_back(static_cast<Eigen::Index>(it - support.begin()));
  }
  RealMatrix out = RealMatrix::Zero(n, n);
  const auto& r = model.rho.matrix();
  for (std::size_t a = 0; a < where.size(); ++a)
    for (std::size_t b = 0; b < where.size(); ++b)
      out(where[a], where[b]) = r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return density::DensityMatrix<Real>(std::move(out));
}

std::vector<RankedModel> rank_models(const QlmModel& query, std::span<const QlmModel> docs,
                                     double lambda, double floor) {
  if (docs.empty()) throw InvalidArgument("rank_models: no document models");
  std::vector<const QlmModel*> all{&query};
  for (const auto& d : docs) all.push_back(&d);
  const auto support = union_support(all);
  const auto n = static_cast<Eigen::Index>(support.size());

  std::vector<density::DensityMatrix<Real>> embedded;
  RealMatrix coll = RealMatrix::Zero(n, n);
  for (const auto& d : docs) {
    embedded.push_back(embed(d, support));
    coll += embedded.back().matrix();
  }
  const density::DensityMatrix<Real> rho_coll(coll / static_cast<double>(docs.size()));
  const auto rho_q = embed(query, support);

  std::vector<RankedModel> out;
  for (std::size_t k = 0; k < docs.size(); ++k) {
    out.push_back({docs[k].label,
                   divergence_rank(rho_q, smooth(embedded[k], rho_coll, lambda), floor)});
  }
  std::sort(out.begin(), out.end(), [](const RankedModel& a, const RankedModel& b) {
    if (a.divergence != b.divergence) return a.divergence < b.divergence;
    return a.label < b.label;
  });
  return out;
}

std::vector<std::vector<WeightedTerm>> read_phrases(std::istream& in) {
  std::vector<std::vector<WeightedTerm>> phrases;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto body = textio::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<WeightedTerm> phrase;
    std::istringstream words{std::string(body)};
    std::string word;
    while (words >> word) {
      WeightedTerm wt;
      std::string_view term = word;
      const auto colon = word.rfind(':');
      if (colon != std::string::npos) {
        term = std::string_view(word).substr(0, colon);
        try {
          wt.weight = textio::parse_real(std::string_view(word).substr(colon + 1));
        } catch (const ParseError& e) {
          throw ParseError("phrases line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!(wt.weight > 0.0)) {
          throw ParseError("phrases line " + std::to_string(lineno) +
                           ": weights must be positive");
        }
      }
      const auto toks = corpus::tokenize(term);
      if (toks.size() != 1) {
        throw ParseError("phrases line " + std::to_string(lineno) + ": bad term '" +
                         std::string(term) + "'");
      }
      wt.term = toks.front();
      phrase.push_back(std::move(wt));
    }
    phrases.push_back(std::move(phrase));
  }
  return phrases;
}

namespace {

ObservationSet observations_from_weights(
    const corpus::TermDocumentIndex& ix, const std::map<std::string, double>& weights,
    std::span<const std::vector<WeightedTerm>> phrases) {
  ObservationSet out;
  for (const auto& [term, w] : weights) {
    if (!(w > 0.0)) continue;
    const WeightedTerm wt{term, 1.0};
    out.observations.push_back({phrase_projector({&wt, 1}, ix.vocab()), w});
  }
  for (const auto& phrase : phrases) {
    double w = std::numeric_limits<double>::infinity();
    bool present = !phrase.empty();
    for (const auto& wt : phrase) {
      const auto it = weights.find(wt.term);
      if (it == weights.end() || !(it->second > 0.0)) {
        present = false;
        break;
      }
      w = std::min(w, it->second);
    }
    if (!present) continue;
    out.observations.push_back({phrase_projector(phrase, ix.vocab()), w});
  }
  return out;
}

}  // namespace

ObservationSet document_observations(const corpus::TermDocumentIndex& ix,
                                     std::string_view doc_id,
                                     std::span<const std::vector<WeightedTerm>> phrases) {
  const auto d = ix.doc_index(doc_id);
  if (!d) throw UnknownTermError(std::string(doc_id));
  std::map<std::string, double> weights;
  for (const auto& e : ix.entries()) {
    if (e.doc == *d) weights[ix.vocab()[e.term]] = e.weight;
  }
  auto out = observations_from_weights(ix, weights, phrases);
  if (out.observations.empty()) {
    throw InvalidArgument("document '" + std::string(doc_id) + "' has no weighted terms");
  }
  return out;
}

ObservationSet text_observations(const corpus::TermDocumentIndex& ix,
                                 std::span<const std::string> tokens,
                                 std::span<const std::vector<WeightedTerm>> phrases) {
  std::map<std::string, double> counts;
  std::vector<std::string> warnings;
  for (const auto& t : tokens) {
    if (ix.term_index(t)) {
      counts[t] += 1.0;
    } else {
      warnings.push_back("skipping unknown term '" + t + "'");
    }
  }
  auto out = observations_from_weights(ix, counts, phrases);
  out.warnings = std::move(warnings);
  if (out.observations.empty()) throw InvalidArgument("text has no indexed terms");
  return out;
}

std::string serialize_model(const QlmModel& model) {
  const auto& r = model.rho.matrix();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(r.size()));
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j) flat.push_back(r(i, j));
  const nlohmann::json j{{"format", "qsem-qlm"},
                         {"version", kModelVersion},
                         {"label", model.label},
                         {"support", model.support},
                         {"rho", flat},
                         {"log_likelihood", model.log_likelihood_trace},
                         {"iterations", model.iterations},
                         {"converged", model.converged}};
  return j.dump(1) + "\n";
}

QlmModel deserialize_model(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "qsem-qlm") {
      throw VersionError("not a qsem QLM model");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw VersionError("unsupported QLM model version " + j.at("version").dump());
    }
    auto support = j.at("support").get<std::vector<std::string>>();
    const auto flat = j.at("rho").get<std::vector<double>>();
    const auto n = static_cast<Eigen::Index>(support.size());
    if (static_cast<Eigen::Index>(flat.size()) != n * n) {
      throw CorruptDataError("QLM model: rho has " + std::to_string(flat.size()) +
                             " entries for support of " + std::to_string(n));
    }
    if (!std::is_sorted(support.begin(), support.end())) {
      throw CorruptDataError("QLM model: support must be sorted");
    }
    RealMatrix rho(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) rho(i, k) = flat[static_cast<std::size_t>(i * n + k)];
    return QlmModel{j.at("label").get<std::string>(),
                    std::move(support),
                    density::DensityMatrix<Real>(std::move(rho), tol::kRank),
                    j.at("log_likelihood").get<std::vector<double>>(),
                    j.at("iterations").get<std::size_t>(),
                    j.at("converged").get<bool>()};
  } catch (const nlohmann::json::exception& e) {
    throw CorruptDataError(std::string("QLM model: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptDataError(std::string("QLM model: ") + e.what());
  }
}

void save_model(const QlmModel& model, const std::filesystem::path& path) {
  textio::write_file(path, serialize_model(model));
}

QlmModel load_model(const std::filesystem::path& path) {
  return deserialize_model(textio::read_file(path));
}

}  // namespace qsem::qlm
