// Serial reference against OpenMP version of each parallel kernel.
#include <benchmark/benchmark.h>

#include <vector>

#include "csl/oracle.hpp"
#include "csl/propagator.hpp"
#include "csl/scattering.hpp"
#include "csl/twoparticle.hpp"
#include "csl/twoslit.hpp"

using namespace csl;

namespace {

std::vector<double> line(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

template <bool Parallel>
void screen(benchmark::State& st) {
  twoslit::TwoSlitConfig c;
  c.dynamics = Dynamics::natural(0.001);
  const auto xs = line(-40, 40, static_cast<int>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(Parallel ? twoslit::screen_pdf_grid(c, xs) : twoslit::screen_pdf_grid_serial(c, xs));
  }
}

template <bool Parallel>
void propagated_pdf(benchmark::State& st) {
  const Dynamics dyn = Dynamics::natural(0.01);
  const auto rho0 = propagator::gaussian_packet(1.0, 0.0, 1.0, 1.0);
  const auto xs = line(-20, 20, static_cast<int>(st.range(0)));
  for (auto _ : st) {
    const auto rho = Parallel ? propagator::evolve(rho0, 3.0, dyn) : propagator::evolve_serial(rho0, 3.0, dyn);
    benchmark::DoNotOptimize(Parallel ? propagator::sample_pdf(rho, xs) : propagator::sample_pdf_serial(rho, xs));
  }
}

template <bool Parallel>
void second_order(benchmark::State& st) {
  scattering::ScatteringConfig c;
  const auto ps = line(-1.5, 1.5, static_cast<int>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(Parallel ? scattering::second_order_grid(ps, c)
                                      : scattering::second_order_grid_serial(ps, c));
  }
}

template <bool Parallel>
void joint(benchmark::State& st) {
  twoparticle::TwoParticleConfig c;
  c.t = 3.0;
  c.dynamics = Dynamics::natural(0.1);
  const auto Xs = line(-5, 5, static_cast<int>(st.range(0)));
  const auto xis = line(-10, 10, static_cast<int>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(Parallel ? twoparticle::joint_pdf_grid(Xs, xis, c)
                                      : twoparticle::joint_pdf_grid_serial(Xs, xis, c));
  }
}

template <bool Parallel>
void ensemble(benchmark::State& st) {
  const auto g = oracle::Grid::centred(128, 24.0);
  oracle::SdeSettings s;
  s.dynamics = Dynamics::natural(0.05);
  const auto psi0 = oracle::gaussian_wavefunction(g, 1.0);
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) {
    benchmark::DoNotOptimize(Parallel ? oracle::ensemble_average(g, psi0, 0.1, 1e-3, s, n, 1)
                                      : oracle::ensemble_average_serial(g, psi0, 0.1, 1e-3, s, n, 1));
  }
}

}  // namespace

BENCHMARK(screen<false>)->Arg(100000);
BENCHMARK(screen<true>)->Arg(100000);
BENCHMARK(propagated_pdf<false>)->Arg(20000);
BENCHMARK(propagated_pdf<true>)->Arg(20000);
BENCHMARK(second_order<false>)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(second_order<true>)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(joint<false>)->Arg(400);
BENCHMARK(joint<true>)->Arg(400);
BENCHMARK(ensemble<false>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(ensemble<true>)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
