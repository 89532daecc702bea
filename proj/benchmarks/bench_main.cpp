#include <array>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cavphase/dynamics.hpp"
#include "cavphase/experiments.hpp"
#include "cavphase/model.hpp"
#include "cavphase/protocol.hpp"

namespace {

using namespace cavphase;

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {d(rng), d(rng)};
  return m;
}

// Two-subsystem local unitary on the Fig. 5 density matrix.
void BM_ApplyLocal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpaceLayout layout = model::system_layout(n, 2, true);
  Matrix rho = random_matrix(layout.total_dim(), layout.total_dim(), 1);
  const Matrix u = random_matrix(8, 8, 2);
  const std::array<std::size_t, 2> subs{0, 1};
  for (auto _ : state) {
    apply_local(rho, u, subs, layout);
    benchmark::DoNotOptimize(rho.data());
  }
}
BENCHMARK(BM_ApplyLocal)->DenseRange(1, 3);

void BM_LindbladDispersive(benchmark::State& state) {
  const dynamics::Method method =
      state.range(0) == 0 ? dynamics::Method::kRk4 : dynamics::Method::kTaylor;
  const model::PhysicalParams p = model::reference_parameters(10.0, 0.99, 2, 2);
  const SpaceLayout layout = model::system_layout(2, 2, false);
  const Operator h = model::dispersive_hamiltonian_full(p, layout) +
                     Complex(-p.delta_c) * model::excitation_number(layout);
  const std::vector<Operator> c = model::collapse_operators(model::reference_noise(), layout);
  const StateVector psi =
      StateVector(layout, random_matrix(layout.total_dim(), 1, 3).col(0)).normalized();
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  dynamics::EvolutionConfig cfg =
      method == dynamics::Method::kRk4 ? dynamics::EvolutionConfig{} : dynamics::EvolutionConfig::taylor();
  const double t = 3.14159265358979 * p.delta_c / (p.g * p.g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dynamics::evolve_lindblad(h, c, t, rho, cfg));
  }
  state.SetLabel(method == dynamics::Method::kRk4 ? "rk4" : "taylor");
}
BENCHMARK(BM_LindbladDispersive)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Fig4Point(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const protocol::GateAngles angles = protocol::GateAngles::uniform(n, 1.0);
  const model::PhysicalParams p = protocol::effective_parameters(angles, 0.99);
  const protocol::ProductInput input = protocol::ProductInput::uniform(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(protocol::branch_product_final_state(p, angles, input));
  }
}
BENCHMARK(BM_Fig4Point)->Arg(1)->Arg(10)->Arg(15);

void BM_GateCheckDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const model::PhysicalParams p =
      protocol::effective_parameters(protocol::GateAngles::qft(n), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(protocol::protocol_unitary(p, protocol::SimulationMode::ideal()));
  }
}
BENCHMARK(BM_GateCheckDense)->DenseRange(1, 3);

void BM_Fig5Point(benchmark::State& state) {
  experiments::SweepConfig cfg;
  cfg.targets = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(experiments::fig5_point(cfg, 10.0, false));
  }
}
BENCHMARK(BM_Fig5Point)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
