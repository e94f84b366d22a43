#include <benchmark/benchmark.h>

#include "anholonome/hamel.hpp"
#include "anholonome/reduction.hpp"
#include "anholonome/routh.hpp"
#include "anholonome/zoo.hpp"

using namespace anholonome;

namespace {

const BuiltSystem& system_at(int index) {
  static const std::vector<BuiltSystem> systems = [] {
    std::vector<BuiltSystem> out;
    for (const auto& spec : zoo()) out.push_back(build_system(spec));
    return out;
  }();
  return systems.at(static_cast<std::size_t>(index));
}

void zoo_args(benchmark::internal::Benchmark* b) {
  for (int i = 0; i < static_cast<int>(zoo().size()); ++i) b->Arg(i);
}

CState sample_state(const ConstrainedSystem& sys) {
  CState s{ChartPoint{Eigen::VectorXd::LinSpaced(sys.dim(), 0.1, 0.9)}, Eigen::VectorXd::LinSpaced(sys.rank(), 1.0, -0.5)};
  return s;
}

}  // namespace

static void BM_EvalJet(benchmark::State& state) {
  const auto& b = system_at(static_cast<int>(state.range(0)));
  const CState s = sample_state(b.system);
  const NaturalVelocity u = natural_velocity(b.system, s);
  for (auto _ : state) benchmark::DoNotOptimize(b.system.lagrangian().eval(s.x, u));
  state.SetLabel(b.system.name());
}
BENCHMARK(BM_EvalJet)->Apply(zoo_args);

static void BM_ConstrainedDynamics(benchmark::State& state) {
  const auto& b = system_at(static_cast<int>(state.range(0)));
  const CState s = sample_state(b.system);
  for (auto _ : state) benchmark::DoNotOptimize(constrained_dynamics(b.system, s));
  state.SetLabel(b.system.name());
}
BENCHMARK(BM_ConstrainedDynamics)->Apply(zoo_args);

static void BM_MultiplierOracle(benchmark::State& state) {
  const auto& b = system_at(static_cast<int>(state.range(0)));
  const CState s = sample_state(b.system);
  for (auto _ : state) benchmark::DoNotOptimize(multiplier_oracle(b.system, s));
  state.SetLabel(b.system.name());
}
BENCHMARK(BM_MultiplierOracle)->Apply(zoo_args);

static void BM_ReducedRhs(benchmark::State& state) {
  const auto& b = system_at(0);
  const ReducedState rs = project_state(*b.split, sample_state(b.system));
  for (auto _ : state) benchmark::DoNotOptimize(reduced_rhs(*b.split, rs));
}
BENCHMARK(BM_ReducedRhs);

static void BM_RouthRhs(benchmark::State& state) {
  const auto& b = system_at(0);
  const MomentumLevel mu{Eigen::VectorXd::Constant(1, 2.0)};
  const RouthState s{ChartPoint{Eigen::Vector3d(0.4, 0.0, 0.0)}, Eigen::VectorXd::Constant(1, 1.0)};
  for (auto _ : state) benchmark::DoNotOptimize(routh_rhs(*b.horizontal, mu, s));
}
BENCHMARK(BM_RouthRhs);

// One second of simulated time at h = 1e-3.
static void BM_Integrate(benchmark::State& state) {
  const auto& b = system_at(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(b.system, b.default_state, 1e-3, 1.0));
  state.SetLabel(b.system.name());
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Integrate)->Apply(zoo_args)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
