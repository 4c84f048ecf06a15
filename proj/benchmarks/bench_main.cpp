#include <random>
#include <sstream>
#include <string>

#include <benchmark/benchmark.h>

#include "qsem/compose.hpp"
#include "qsem/corpus.hpp"
#include "qsem/numkernel.hpp"
#include "qsem/qlm.hpp"
#include "qsem/retrieval.hpp"

namespace {

using namespace qsem;

void BM_HermitianEig(benchmark::State& state) {
  const auto n = state.range(0);
  const RealMatrix a = RealMatrix::Random(n, n);
  const RealMatrix h = a + a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig<Real>(h));
}
BENCHMARK(BM_HermitianEig)->Arg(16)->Arg(64)->Arg(256);

corpus::TermDocumentIndex synthetic_index(int docs) {
  std::mt19937_64 gen(3);
  std::discrete_distribution<int> pick({8, 6, 5, 4, 3, 3, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1});
  std::ostringstream tsv;
  for (int d = 0; d < docs; ++d) {
    tsv << "d" << d << '\t';
    for (int k = 0; k < 40; ++k) tsv << 't' << pick(gen) * 37 + static_cast<int>(gen() % 37) << ' ';
    tsv << '\n';
  }
  std::istringstream in(tsv.str());
  return corpus::build_index(corpus::ingest_tsv(in), corpus::Weighting::kTfIdf);
}

void BM_Search(benchmark::State& state) {
  const auto ix = synthetic_index(static_cast<int>(state.range(0)));
  const auto ast = retrieval::parse_query("t1 t40 NOT t75");
  for (auto _ : state) benchmark::DoNotOptimize(retrieval::search(ix, ast, 10));
}
BENCHMARK(BM_Search)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BindDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RealVector a = compose::random_real_unit_vector(n, 1, "a");
  const RealVector b = compose::random_real_unit_vector(n, 1, "b");
  for (auto _ : state) {
    benchmark::DoNotOptimize(compose::bind<Real>(a, b, compose::BindMode::kCircularConvolution));
  }
}
BENCHMARK(BM_BindDirect)->Arg(256)->Arg(1024);

void BM_BindFft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RealVector a = compose::random_real_unit_vector(n, 1, "a");
  const RealVector b = compose::random_real_unit_vector(n, 1, "b");
  for (auto _ : state) benchmark::DoNotOptimize(compose::bind_fft<Real>(a, b));
}
BENCHMARK(BM_BindFft)->Arg(256)->Arg(1024);

void BM_EstimateRho(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < n; ++i) vocab.push_back("v" + std::to_string(i));
  std::mt19937_64 gen(9);
  std::vector<qlm::Observation> obs;
  for (std::size_t i = 0; i < 3 * n; ++i) {
    std::vector<qlm::WeightedTerm> terms{{vocab[gen() % n], 1.0}, {vocab[gen() % n], 0.5}};
    obs.push_back({qlm::phrase_projector(terms, vocab), 1.0});
  }
  for (auto _ : state) benchmark::DoNotOptimize(qlm::estimate_rho(obs, 200, 1e-8));
}
BENCHMARK(BM_EstimateRho)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
