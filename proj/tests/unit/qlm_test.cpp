#include <cmath>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "qsem/corpus.hpp"
#include "qsem/errors.hpp"
#include "qsem/qlm.hpp"
#include "test_util.hpp"

namespace qsem::qlm {
namespace {

using density::DensityMatrix;

std::vector<std::string> vocab_of(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(std::string(1, static_cast<char>('a' + i)));
  return v;
}

TermProjector unigram(const std::string& t, const std::vector<std::string>& vocab) {
  const WeightedTerm wt{t, 1.0};
  return phrase_projector({&wt, 1}, vocab);
}

RealMatrix diag(std::initializer_list<double> xs) {
  RealVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v.asDiagonal();
}

// Random observation set: unigrams and random positive-weight phrases.
std::vector<Observation> random_observations(const std::vector<std::string>& vocab,
                                             std::size_t count) {
  auto& gen = testing::rng();
  std::uniform_real_distribution<double> w(0.2, 3.0);
  std::vector<Observation> obs;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<WeightedTerm> terms;
    const std::size_t len = testing::random_index(1, std::min<std::size_t>(3, vocab.size()));
    for (std::size_t k = 0; k < len; ++k) {
      terms.push_back({vocab[testing::random_index(0, vocab.size() - 1)], w(gen)});
    }
    obs.push_back({phrase_projector(terms, vocab), 1.0});
  }
  return obs;
}

TEST(PhraseProjector, SingleTermIsDiagonalDyad) {
  const auto vocab = vocab_of(4);
  const RealMatrix p = unigram("c", vocab).dense(4);
  RealMatrix expected = RealMatrix::Zero(4, 4);
  expected(2, 2) = 1.0;
  EXPECT_EQ(p, expected);
}

TEST(PhraseProjector, EqualWeightsGiveHalfOffDiagonal) {
  const auto vocab = vocab_of(2);
  const std::vector<WeightedTerm> t{{"a", 2.0}, {"b", 2.0}};
  const RealMatrix p = phrase_projector(t, vocab).dense(2);
  EXPECT_NEAR(p(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(p(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(p(0, 0), 0.5, 1e-15);
}

TEST(PhraseProjector, ThreeFourWeights) {
  const auto vocab = vocab_of(3);
  const std::vector<WeightedTerm> t{{"a", 3.0}, {"c", 4.0}};
  const RealMatrix p = phrase_projector(t, vocab).dense(3);
  EXPECT_NEAR(p(0, 0), 9.0 / 25, 1e-15);
  EXPECT_NEAR(p(2, 2), 16.0 / 25, 1e-15);
  EXPECT_NEAR(p(0, 2), 12.0 / 25, 1e-15);
  EXPECT_NEAR(p(1, 1), 0.0, 1e-15);
}

TEST(PhraseProjector, Errors) {
  const auto vocab = vocab_of(2);
  const std::vector<WeightedTerm> unknown{{"zz", 1.0}};
  EXPECT_THROW(phrase_projector(unknown, vocab), UnknownTermError);
  const std::vector<WeightedTerm> zero{{"a", 0.0}};
  EXPECT_THROW(phrase_projector(zero, vocab), InvalidArgument);
  EXPECT_THROW(phrase_projector({}, vocab), InvalidArgument);
}

TEST(Estimate, UnigramsMatchMultinomialMle) {
  const auto vocab = vocab_of(4);
  const std::map<std::string, double> counts{{"a", 5}, {"b", 3}, {"c", 1}, {"d", 1}};
  std::vector<Observation> obs;
  for (const auto& [t, c] : counts) obs.push_back({unigram(t, vocab), c});
  const auto model = estimate_rho(obs, 10000, 1e-14);
  ASSERT_EQ(model.support, vocab);
  const RealMatrix& rho = model.rho.matrix();
  std::size_t k = 0;
  for (const auto& [t, c] : counts) {
    EXPECT_NEAR(rho(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), c / 10.0, 1e-6);
    ++k;
  }
  RealMatrix off = rho;
  off.diagonal().setZero();
  EXPECT_LE(off.cwiseAbs().sum(), 1e-8);
}

TEST(Estimate, RepeatedUnigramObservationsCountAsWeights) {
  const auto vocab = vocab_of(3);
  std::vector<TermProjector> obs{unigram("a", vocab), unigram("a", vocab), unigram("b", vocab),
                                 unigram("c", vocab)};
  const auto model = estimate_rho(obs, 10000, 1e-14);
  EXPECT_NEAR(model.rho.matrix()(0, 0), 0.5, 1e-6);
  EXPECT_NEAR(model.rho.matrix()(1, 1), 0.25, 1e-6);
}

TEST(Estimate, SinglePhraseConvergesToItsProjector) {
  const auto vocab = vocab_of(2);
  const std::vector<WeightedTerm> t{{"a", 1.0}, {"b", 2.0}};
  const auto pi = phrase_projector(t, vocab);
  const auto model = estimate_rho(std::vector<TermProjector>{pi}, 10000, 1e-14);
  const RealMatrix target = pi.dense(2);
  EXPECT_LE((model.rho.matrix() - target).cwiseAbs().maxCoeff(), 1e-6);

  // Oracle: over a grid of 2x2 real densities, the likelihood tr(rho Pi) peaks
  // at Pi itself.
  double best = -1.0;
  RealMatrix arg;
  for (int i = 0; i <= 200; ++i) {
    for (int j = -100; j <= 100; ++j) {
      const double p = i / 200.0, q = j / 200.0;
      RealMatrix rho(2, 2);
      rho << p, q, q, 1 - p;
      if (p * (1 - p) - q * q < 0) continue;
      const double like = (rho * target).trace();
      if (like > best) {
        best = like;
        arg = rho;
      }
    }
  }
  EXPECT_LE((arg - target).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_GE((model.rho.matrix() * target).trace(), best - 1e-9);
}

TEST(Estimate, LikelihoodNonDecreasingAndIteratesValid) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto vocab = vocab_of(testing::random_index(1, 8));
    const auto obs = random_observations(vocab, testing::random_index(1, 30));
    std::vector<double> seen;
    const auto model = estimate_rho(obs, 300, 1e-12, [&](const RealMatrix& rho, double l) {
      seen.push_back(l);
      EXPECT_NEAR(rho.trace(), 1.0, 1e-8);
      EXPECT_GE(hermitian_eig<Real>(rho, 1e-9).values.minCoeff(), -1e-8);
    });
    ASSERT_EQ(seen, model.log_likelihood_trace);
    for (std::size_t k = 1; k < seen.size(); ++k) EXPECT_GE(seen[k], seen[k - 1] - 1e-9);
  }
}

TEST(Estimate, LogLikelihoodMatchesDirectSum) {
  const auto vocab = vocab_of(3);
  const auto obs = random_observations(vocab, 6);
  const auto model = estimate_rho(obs, 200, 1e-12);
  double direct = 0.0;
  for (const auto& o : obs) {
    RealVector v = RealVector::Zero(static_cast<Eigen::Index>(model.support.size()));
    for (std::size_t k = 0; k < o.projector.names().size(); ++k) {
      const auto at = std::find(model.support.begin(), model.support.end(), o.projector.names()[k]);
      v(at - model.support.begin()) = o.projector.components()[k].second;
    }
    direct += o.weight * std::log(v.dot(model.rho.matrix() * v));
  }
  EXPECT_NEAR(model.log_likelihood_trace.back(), direct, 1e-9);
}

TEST(Estimate, Deterministic) {
  const auto vocab = vocab_of(5);
  const auto obs = random_observations(vocab, 10);
  const auto a = estimate_rho(obs, 200, 1e-12);
  const auto b = estimate_rho(obs, 200, 1e-12);
  EXPECT_EQ(a.rho.matrix(), b.rho.matrix());
  EXPECT_EQ(a.log_likelihood_trace, b.log_likelihood_trace);
}

TEST(Estimate, Errors) {
  EXPECT_THROW(estimate_rho(std::vector<Observation>{}, 10, 1e-6), InvalidArgument);
  const auto vocab = vocab_of(2);
  const std::vector<TermProjector> one{unigram("a", vocab)};
  EXPECT_THROW(estimate_rho(one, 0, 1e-6), InvalidArgument);
  EXPECT_THROW(estimate_rho(one, 10, 0.0), InvalidArgument);
}

TEST(Estimate, MaxItersCapReportsNotConverged) {
  const auto vocab = vocab_of(3);
  std::vector<Observation> obs{{unigram("a", vocab), 7}, {unigram("b", vocab), 2},
                               {unigram("c", vocab), 1}};
  const auto model = estimate_rho(obs, 1, 1e-14);
  EXPECT_EQ(model.iterations, 1u);
  EXPECT_FALSE(model.converged);
}

TEST(Smooth, Examples) {
  const DensityMatrix<Real> d(diag({1, 0}));
  const DensityMatrix<Real> c(diag({0.5, 0.5}));
  EXPECT_EQ(smooth(d, c, 0.0).matrix(), d.matrix());
  EXPECT_EQ(smooth(d, c, 1.0).matrix(), c.matrix());
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix<Real> a(testing::random_density<Real>(4, 2));
    const DensityMatrix<Real> b(testing::random_density<Real>(4, 3));
    const double lambda = std::uniform_real_distribution<double>(0, 1)(testing::rng());
    EXPECT_NEAR(smooth(a, b, lambda).matrix().trace(), 1.0, 1e-12);
  }
  EXPECT_THROW(smooth(d, c, 1.5), InvalidArgument);
  EXPECT_THROW(smooth(d, c, -0.1), InvalidArgument);
}

// Klein-inequality oracle computed from two eigendecompositions.
double relative_entropy_oracle(const RealMatrix& p, const RealMatrix& q) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> ep(p), eq(q);
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double lp = ep.eigenvalues()(i);
    if (lp <= 1e-12) continue;
    s += lp * std::log(lp);
    for (Eigen::Index j = 0; j < q.rows(); ++j) {
      const double overlap = ep.eigenvectors().col(i).dot(eq.eigenvectors().col(j));
      s -= lp * overlap * overlap * std::log(std::max(eq.eigenvalues()(j), 1e-12));
    }
  }
  return s;
}

TEST(Divergence, SelfIsZero) {
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix<Real> rho(testing::random_density<Real>(5, 3));
    EXPECT_NEAR(divergence_rank(rho, rho), 0.0, 1e-10);
  }
}

TEST(Divergence, NonNegativeOnSmoothedPairs) {
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = testing::random_index(1, 6);
    const DensityMatrix<Real> q(testing::random_density<Real>(n, testing::random_index(1, n)));
    const DensityMatrix<Real> d(testing::random_density<Real>(n, testing::random_index(1, n)));
    const auto ds = smooth(d, DensityMatrix<Real>::maximally_mixed(n), 0.1);
    const double delta = divergence_rank(q, ds);
    EXPECT_GE(delta, -1e-12);
    EXPECT_NEAR(delta, relative_entropy_oracle(q.matrix(), ds.matrix()), 1e-9);
  }
}

TEST(Divergence, DiagonalIsClassicalKl) {
  const DensityMatrix<Real> q(diag({1, 0}));
  const DensityMatrix<Real> d(diag({0.5, 0.5}));
  EXPECT_NEAR(divergence_rank(q, d), std::log(2.0), 1e-10);
  EXPECT_THROW(divergence_rank(q, DensityMatrix<Real>::maximally_mixed(3)), DimensionError);
}

corpus::TermDocumentIndex phrase_corpus() {
  std::istringstream in(
      "both\tclimate change policy climate change\n"
      "only\tchange policy reform\n"
      "other\tweather report\n");
  return corpus::build_index(corpus::ingest_tsv(in), corpus::Weighting::kCount);
}

TEST(Rank, PhraseDocumentBeatsSingleTermDocument) {
  const auto ix = phrase_corpus();
  const std::vector<std::vector<WeightedTerm>> phrases{{{"climate", 1}, {"change", 1}}};
  std::vector<QlmModel> docs;
  for (const auto* id : {"both", "only", "other"}) {
    const auto obs = document_observations(ix, id, phrases);
    auto m = estimate_rho(obs.observations, 2000, 1e-12);
    m.label = id;
    docs.push_back(std::move(m));
  }
  const std::vector<Observation> qobs{
      {phrase_projector(phrases[0], ix.vocab()), 1.0}};
  auto q = estimate_rho(qobs, 2000, 1e-12);
  const auto ranked = rank_models(q, docs, 0.1);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].label, "both");
  double both = 0, only = 0;
  for (const auto& r : ranked) {
    if (r.label == "both") both = r.divergence;
    if (r.label == "only") only = r.divergence;
  }
  EXPECT_LT(both, only);
}

TEST(Observations, DocumentAndText) {
  const auto ix = phrase_corpus();
  const std::vector<std::vector<WeightedTerm>> phrases{{{"climate", 1}, {"change", 1}},
                                                        {{"weather", 1}, {"climate", 1}}};
  const auto obs = document_observations(ix, "both", phrases);
  // Three unigrams plus the one phrase fully present.
  ASSERT_EQ(obs.observations.size(), 4u);
  // Phrase weight is the smaller of the climate and change counts.
  EXPECT_EQ(obs.observations[3].weight, 2.0);
  EXPECT_THROW(document_observations(ix, "nope", phrases), UnknownTermError);

  const auto text = text_observations(ix, corpus::tokenize("climate zebra climate"), phrases);
  ASSERT_EQ(text.observations.size(), 1u);
  EXPECT_EQ(text.observations[0].weight, 2.0);
  ASSERT_EQ(text.warnings.size(), 1u);
  EXPECT_THROW(text_observations(ix, corpus::tokenize("zebra"), phrases), InvalidArgument);
}

TEST(Phrases, ReadFile) {
  std::istringstream in("# comment\nclimate change\nClimate:2 change:0.5\n\n");
  const auto p = read_phrases(in);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], (std::vector<WeightedTerm>{{"climate", 1}, {"change", 1}}));
  EXPECT_EQ(p[1], (std::vector<WeightedTerm>{{"climate", 2}, {"change", 0.5}}));
  std::istringstream bad("a:x\n");
  EXPECT_THROW(read_phrases(bad), ParseError);
  std::istringstream neg("a:-1\n");
  EXPECT_THROW(read_phrases(neg), ParseError);
}

TEST(ModelFile, RoundTripExact) {
  const auto vocab = vocab_of(4);
  auto model = estimate_rho(random_observations(vocab, 8), 100, 1e-10);
  model.label = "doc7";
  const auto back = deserialize_model(serialize_model(model));
  EXPECT_EQ(back.label, "doc7");
  EXPECT_EQ(back.support, model.support);
  EXPECT_EQ(back.rho.matrix(), model.rho.matrix());
  EXPECT_EQ(back.log_likelihood_trace, model.log_likelihood_trace);
  EXPECT_EQ(back.iterations, model.iterations);
  EXPECT_EQ(back.converged, model.converged);
  EXPECT_EQ(serialize_model(back), serialize_model(model));
}

TEST(ModelFile, Errors) {
  EXPECT_THROW(deserialize_model("{}"), CorruptDataError);
  EXPECT_THROW(deserialize_model("not json"), CorruptDataError);
  EXPECT_THROW(deserialize_model(R"({"format":"other","version":1})"), VersionError);
  EXPECT_THROW(deserialize_model(R"({"format":"qsem-qlm","version":9})"), VersionError);
  EXPECT_THROW(
      deserialize_model(
          R"({"format":"qsem-qlm","version":1,"label":"x","support":["a"],"rho":[1,0],)"
          R"("log_likelihood":[],"iterations":0,"converged":true})"),
      CorruptDataError);
}

}  // namespace
}  // namespace qsem::qlm
