#include <doctest.h>

#include <cmath>
#include <random>

#include "csl/errors.hpp"
#include "csl/propagator.hpp"
#include "csl/twoparticle.hpp"
#include "reference.hpp"

using namespace csl;
using namespace csl::twoparticle;

namespace {

constexpr double kPi = 3.14159265358979323846;

TwoParticleConfig make(double sigma, double t, Dynamics d) {
  TwoParticleConfig c;
  c.sigma = sigma;
  c.t = t;
  c.dynamics = d;
  return c;
}

// Joint distribution in the centre-of-mass and relative coordinates, written out.
double written_out(double X, double xi, const TwoParticleConfig& c) {
  const double hb = c.dynamics.hbar, m = c.dynamics.mass, D = c.dynamics.D, t = c.t, s = c.sigma;
  const double s2 = s * s, m2 = m * m;
  const double L = D * hb * hb * std::pow(t, 5) / (3 * m2 * m2 * std::pow(s, 6)) +
                   std::pow(hb * t, 4) / (16 * m2 * m2 * std::pow(s, 8)) + 4 * D * t * t * t / (3 * m2 * s2) +
                   hb * hb * t * t / (2 * m2 * s2 * s2) + 1;
  const double free = hb * hb * t * t / (4 * m2 * s2 * s2) + 1;
  return 1 / (2 * kPi * s2 * std::sqrt(L)) * std::exp(-free * X * X / (s2 * L)) *
         std::exp(-(4 * D * t * t * t / (3 * m2 * s2) + free) * (xi / 2) * (xi / 2) / (s2 * L));
}

}  // namespace

TEST_CASE("closed form, kernel route and written-out expression agree") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const auto c = make(0.5 + u(rng), 5.0 * u(rng), {0.5 + u(rng), 0.5 + u(rng), 0.2 * u(rng)});
    for (int i = 0; i < 5; ++i) {
      const double X = 3.0 * (u(rng) - 0.5), xi = 3.0 * (u(rng) - 0.5);
      const double w = written_out(X, xi, c);
      CHECK(joint_pdf(X, xi, c) == doctest::Approx(w).epsilon(1e-12));
      CHECK(joint_pdf_from_kernel(X, xi, c) == doctest::Approx(w).epsilon(1e-10));
    }
  }
}

TEST_CASE("joint distribution is normalized") {
  const auto c = make(1.0, 3.0, Dynamics::natural(0.1));
  const auto s = spread_statistics(c);
  const double wX = 12 * s.sigma_X, wxi = 24 * s.sigma_xi_half;
  const double total = ref::trapezoid(
      [&](double X) { return ref::trapezoid([&](double xi) { return joint_pdf(X, xi, c); }, -wxi, wxi, 600); }, -wX,
      wX, 600);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spreads coincide without diffusion and separate with it") {
  CHECK(spread_statistics(make(1.0, 7.0, Dynamics::natural(0.0))).ratio == doctest::Approx(1.0).epsilon(1e-15));
  double prev = 1.0;
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const auto s = spread_statistics(make(1.0, t, Dynamics::natural(0.1)));
    CHECK(s.ratio > prev);
    prev = s.ratio;
  }
  const auto c = make(1.0, 0.0, Dynamics::natural(0.1));
  CHECK(spread_statistics(c).sigma_X == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(spread_L(c) == doctest::Approx(1.0));
}

TEST_CASE("single-particle marginal matches the integrated joint distribution") {
  const auto c = make(1.0, 2.0, Dynamics::natural(0.05));
  const auto rho1 = marginal_single(c);
  CHECK(std::abs(propagator::trace(rho1) - 1.0) < 1e-12);
  for (double x1 : {-1.0, 0.4}) {
    const double numeric = ref::trapezoid([&](double x2) { return joint_pdf(0.5 * (x1 + x2), x1 - x2, c); }, -40, 40, 8000);
    CHECK(propagator::position_pdf(rho1, x1) == doctest::Approx(numeric).epsilon(1e-10));
  }
}

TEST_CASE("kernel satisfies the two-particle master equation") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Dynamics dyn{1.0, 1.0, 0.2};
  for (int k = 0; k < 20; ++k) {
    KernelPoint z;
    for (auto& v : z) v = u(rng);
    CHECK(master_equation_residual(z, 0.7, dyn).relative() < 1e-8);
  }
}

TEST_CASE("long-time exponents") {
  const auto e = asymptotic_exponents(make(1.0, 0.0, Dynamics::natural(0.1)), 1e2, 1e5);
  CHECK(e.slope_X == doctest::Approx(1.5).epsilon(0.01));
  CHECK(e.slope_xi_half == doctest::Approx(1.0).epsilon(0.01));
  CHECK_THROWS_AS(asymptotic_exponents(make(1.0, 0.0, Dynamics::natural(0.1)), 1.0, 10.0), Error);
}

TEST_CASE("validation and warnings") {
  auto c = make(-1.0, 1.0, Dynamics::natural(0.1));
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = make(1.0, 1.0, Dynamics::natural(0.1));
  CHECK(c.warnings().empty());
  c.localization_length = 2.0;
  CHECK_FALSE(c.warnings().empty());
}

TEST_CASE("parallel grid equals serial") {
  const auto c = make(1.0, 3.0, Dynamics::natural(0.1));
  std::vector<double> Xs, xis;
  for (int i = 0; i < 65; ++i) {
    Xs.push_back(-4.0 + 0.125 * i);
    xis.push_back(-8.0 + 0.25 * i);
  }
  CHECK(joint_pdf_grid(Xs, xis, c) == joint_pdf_grid_serial(Xs, xis, c));
  CHECK(joint_pdf_grid(Xs, xis, c)[3 * 65 + 7] == joint_pdf(Xs[3], xis[7], c));
}
