#include <benchmark/benchmark.h>

#include "ioshock/leontief.hpp"
#include "ioshock/shock_analysis.hpp"
#include "testkit/testkit.hpp"

namespace {

ioshock::LeontiefModel model_of(std::int64_t n) {
  testkit::EconomyGenSpec g;
  g.n = static_cast<std::size_t>(n);
  g.seed = 7;
  return ioshock::LeontiefModel::build(testkit::random_economy(g));
}

void BM_LeontiefInverse(benchmark::State& state) {
  const auto model = model_of(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ioshock::leontief_inverse(model.A()));
  }
}
BENCHMARK(BM_LeontiefInverse)->Arg(64)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_Inoperability(benchmark::State& state) {
  const auto model = model_of(state.range(0));
  ioshock::DemandDelta d;
  d.delta_f = -0.1 * model.table().final_demand_total();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ioshock::inoperability(model, d));
  }
}
BENCHMARK(BM_Inoperability)->Arg(64)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_PartialExtraction(benchmark::State& state) {
  const auto model = model_of(state.range(0));
  const auto n = model.size();
  const auto spec = ioshock::ExtractionSpec::uniform(
      n / 2, 0.74, n, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ioshock::partial_extraction(model, spec));
  }
}
BENCHMARK(BM_PartialExtraction)->Arg(64)->Arg(200)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
