#include "varsdp/alm.hpp"
#include "varsdp/bisection.hpp"
#include "varsdp/instances.hpp"
#include "varsdp/variety.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace varsdp;

namespace {

MatrixXd gaussian(Eigen::Index n, Eigen::Index r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXd M(n, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n; ++i) M(i, j) = normal(rng);
  return M;
}

void BM_ProjectTangent(benchmark::State& state) {
  const Eigen::Index n = state.range(0), r = state.range(1);
  VarietyPoint p = random_point(n, r, 1);
  MatrixXd C = gaussian(n, r, 2);
  for (auto _ : state) benchmark::DoNotOptimize(project_tangent(p, C).H.data());
}
BENCHMARK(BM_ProjectTangent)->Args({256, 8})->Args({1024, 16})->Args({4096, 32});

void BM_Retract(benchmark::State& state) {
  const Eigen::Index n = state.range(0), r = state.range(1);
  VarietyPoint p = random_point(n, r, 3);
  MatrixXd H = project_tangent(p, 0.1 * gaussian(n, r, 4)).H;
  for (auto _ : state) benchmark::DoNotOptimize(retract(p, TangentVector{H}).point.factor().data());
}
BENCHMARK(BM_Retract)->Args({256, 8})->Args({1024, 16})->Args({4096, 32});

void BM_LanczosMinEig(benchmark::State& state) {
  Laplacian L(instances::named("hamming-8-4"));
  for (auto _ : state) {
    EigenPair e = lanczos_min_eig(
        [&](const Eigen::Ref<const VectorXd>& x, Eigen::Ref<VectorXd> y) { y = L.apply_vector(x); }, L.n(), 1e-8,
        500, 1);
    benchmark::DoNotOptimize(e.value);
  }
}
BENCHMARK(BM_LanczosMinEig);

void BM_SolveBisection(benchmark::State& state) {
  const char* names[] = {"hamming6-2", "johnson16-2-4", "hamming-8-4"};
  Laplacian L(instances::named(names[state.range(0)]));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bisection(L, BBConfig{}).obj);
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_SolveBisection)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_SolveEquipartition(benchmark::State& state) {
  Laplacian L(instances::named("hamming8-2"));
  for (auto _ : state) benchmark::DoNotOptimize(solve_equipartition(L, 5, ALMConfig{}).obj);
}
BENCHMARK(BM_SolveEquipartition)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
