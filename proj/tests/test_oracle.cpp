#include <doctest.h>

#include <cmath>

#include "csl/errors.hpp"
#include "csl/oracle.hpp"
#include "csl/propagator.hpp"

using namespace csl;
using namespace csl::oracle;

namespace {

MasterSettings quadratic(double D) {
  MasterSettings s;
  s.dynamics = Dynamics::natural(D);
  return s;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((Grid{63, 0.0, 0.1}).validate(), DomainError);
  CHECK_THROWS_AS((Grid{65, 0.0, 0.1}).validate(), DomainError);
  CHECK_THROWS_AS((Grid{64, 0.0, 0.0}).validate(), DomainError);
  const Grid g = Grid::centred(128, 16.0);
  CHECK(g.dx == 0.125);
  CHECK(g.x(64) == doctest::Approx(0.0));
  CHECK(g.k(1) == doctest::Approx(2 * 3.14159265358979323846 / 16.0));
  CHECK(g.k(127) == doctest::Approx(-g.k(1)));
}

TEST_CASE("decoherence rates") {
  auto s = quadratic(0.02);
  CHECK(s.gamma(3.0) == doctest::Approx(0.18));
  s.form = DecoherenceForm::Exponential;
  CHECK_THROWS_AS(s.validate(Grid::centred(64, 8.0)), DomainError);
  s.alpha = 1e-4;
  // Small alpha u^2: the exponential form reduces to D u^2 / hbar^2.
  CHECK(s.gamma(0.5) == doctest::Approx(0.02 * 0.25).epsilon(1e-5));
  s.alpha = 4.0;
  CHECK(s.gamma(100.0) == doctest::Approx(4 * 0.02 / 4.0));
}

TEST_CASE("free evolution on the grid matches the analytic propagator") {
  const Grid g = Grid::centred(256, 32.0);
  const auto rho0 = propagator::gaussian_packet(1.0, 0.5, 0.8, 1.0);
  for (double D : {0.0, 0.02}) {
    const auto s = quadratic(D);
    const auto grid_rho = evolve_master(sample(rho0, g), 1.0, 0.05, s);
    const auto cmp = compare(grid_rho, propagator::evolve(rho0, 1.0, s.dynamics));
    CHECK(cmp.l2_error < 1e-4);
    CHECK(cmp.trace_gap < 1e-10);
    CHECK(grid_rho.time == doctest::Approx(1.0));
  }
}

TEST_CASE("pure decoherence multiplies by exp(-Gamma t)") {
  const Grid g = Grid::centred(128, 24.0);
  auto s = quadratic(0.3);
  s.kinetic = false;
  const auto rho0 = sample(propagator::gaussian_packet(1.0, 0.0, 0.0, 1.0), g);
  const auto rho = evolve_master(rho0, 0.8, 0.2, s);
  for (int i : {40, 64, 70})
    for (int j : {50, 64, 90}) {
      const double u = g.x(i) - g.x(j);
      CHECK(std::abs(rho.values(i, j) - rho0.values(i, j) * std::exp(-0.3 * u * u * 0.8)) < 1e-14);
    }
}

TEST_CASE("border and resolution failures are reported") {
  const Grid small = Grid::centred(128, 8.0);
  CHECK_THROWS_AS(evolve_master(sample(propagator::gaussian_packet(1.5, 0.0, 0.0, 1.0), small), 1.0, 0.1, quadratic(0.0)),
                  NumericalError);
  const Grid coarse = Grid::centred(64, 32.0);
  CHECK_THROWS_AS(evolve_master(sample(propagator::gaussian_packet(0.6, 0.0, 0.0, 1.0), coarse), 0.1, 0.1, quadratic(0.0)),
                  NumericalError);
}

TEST_CASE("trace distance") {
  const Grid g = Grid::centred(64, 16.0);
  const auto a = sample(propagator::gaussian_packet(1.0, -1.0, 0.0, 1.0), g);
  const auto b = sample(propagator::gaussian_packet(1.0, 1.0, 0.0, 1.0), g);
  CHECK(trace_distance(a, a) < 1e-12);
  CHECK(trace_distance(a, b) == doctest::Approx(trace_distance(b, a)));
  // Two pure states: sqrt(1 - |<a|b>|^2) with overlap exp(-d^2 / 8 sigma^2).
  CHECK(trace_distance(a, b) == doctest::Approx(std::sqrt(1.0 - std::exp(-1.0))).epsilon(1e-8));
}

TEST_CASE("trajectories are reproducible and normalized") {
  const Grid g = Grid::centred(64, 16.0);
  SdeSettings s;
  s.dynamics = Dynamics::natural(0.05);
  const auto psi0 = gaussian_wavefunction(g, 1.0);
  SdeTrajectory a(g, psi0, 9, 3), b(g, psi0, 9, 3), c(g, psi0, 9, 4);
  for (int k = 0; k < 100; ++k) {
    step_sde(a, 0.002, s);
    step_sde(b, 0.002, s);
    step_sde(c, 0.002, s);
  }
  CHECK((a.psi - b.psi).norm() == 0.0);
  CHECK((a.psi - c.psi).norm() > 1e-6);
  CHECK(a.psi.squaredNorm() * g.dx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trajectory_seed(1, 0) != trajectory_seed(1, 1));
  CHECK(trajectory_seed(1, 0) != trajectory_seed(2, 0));
}

TEST_CASE("excessive norm drift aborts the step") {
  const Grid g = Grid::centred(64, 16.0);
  SdeSettings s;
  s.dynamics = Dynamics::natural(5.0);
  s.max_norm_drift = 1e-6;
  SdeTrajectory a(g, gaussian_wavefunction(g, 1.0), 1, 0);
  CHECK_THROWS_AS(step_sde(a, 0.1, s), NumericalError);
}

TEST_CASE("without diffusion a trajectory follows the Schroedinger equation") {
  const Grid g = Grid::centred(128, 24.0);
  SdeSettings s;
  s.dynamics = Dynamics::natural(0.0);
  const auto ens = ensemble_average(g, gaussian_wavefunction(g, 1.0, 0.0, 0.5), 1.0, 0.1, s, 1, 0);
  const auto exact = propagator::evolve(propagator::gaussian_packet(1.0, 0.0, 0.5, 1.0), 1.0, s.dynamics);
  CHECK(compare(ens, exact).l2_error < 1e-10);
}

TEST_CASE("ensemble average is independent of the thread schedule") {
  const Grid g = Grid::centred(64, 16.0);
  SdeSettings s;
  s.dynamics = Dynamics::natural(0.05);
  const auto psi0 = gaussian_wavefunction(g, 1.0);
  const auto a = ensemble_average(g, psi0, 0.2, 0.002, s, 37, 5);
  const auto b = ensemble_average_serial(g, psi0, 0.2, 0.002, s, 37, 5);
  CHECK((a.values - b.values).norm() == 0.0);
  CHECK(std::abs(a.trace() - 1.0) < 1e-12);
}
