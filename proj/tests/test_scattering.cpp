#include <doctest.h>

#include <cmath>
#include <random>

#include "csl/errors.hpp"
#include "csl/scattering.hpp"
#include "reference.hpp"

using namespace csl;
using namespace csl::scattering;
using namespace std::complex_literals;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScatteringConfig barrier_case(double D = 1e-4) {
  ScatteringConfig c;
  c.dynamics = Dynamics::natural(D);
  return c;
}

// A and B integrands written out term by term.
Complex written_out(double t1, double t2, double p, const ScatteringConfig& c, bool is_b) {
  const double hb = c.dynamics.hbar, m = c.dynamics.mass, D = c.dynamics.D, t = c.t, a = c.a, pb = c.pbar;
  const double s = t1 - t2;
  const Complex KA = 4 * D * a * a * t / (hb * hb) +
                     D * D / (3 * m * m * hb * hb) * s * s * (4 * (t1 + 2 * t2) * t - 3 * (t1 + t2) * (t1 + t2)) -
                     2i * D / (m * hb) * s * t;
  const Complex K = is_b ? 1.0 + KA + 2i * D / (m * hb) * s * (t1 + t2) : KA;
  const double pre = (is_b ? 1.0 : -1.0) * m * c.V0 * c.V0 / (2 * kPi * hb * hb * hb * pb) / t;
  const double phase_arg = is_b ? p * p - pb * pb : (p - pb) * (p - pb);
  const Complex e = -a * a / (K * hb * hb) * (p - pb) * (p - pb) + 1i * s / (2.0 * K * m * hb) * phase_arg -
                    D * s * s * (t1 + 2 * t2) / (3.0 * K * m * m * hb * hb) * p * p -
                    D * s * s * s / (3.0 * K * m * m * hb * hb) * pb * p -
                    D * s * s * (3 * t - 2 * t1 - t2) / (3.0 * K * m * m * hb * hb) * pb * pb;
  return pre / std::sqrt(K) * std::exp(e);
}

}  // namespace

TEST_CASE("integrands match the written-out expressions") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    auto c = barrier_case(std::pow(10.0, -6.0 + 4.0 * u(rng)));
    c.a = 0.05 + 0.2 * u(rng);
    c.t = 10.0 + 100.0 * u(rng);
    const double t1 = c.t * u(rng), t2 = t1 * u(rng), p = 3.0 * (u(rng) - 0.5);
    const Complex A = written_out(t1, t2, p, c, false);
    const Complex B = written_out(t1, t2, p, c, true);
    CHECK(std::abs(integrand_A(t1, t2, p, c) - A) <= 1e-11 * std::abs(A) + 1e-300);
    CHECK(std::abs(integrand_B(t1, t2, p, c) - B) <= 1e-11 * std::abs(B) + 1e-300);
    CHECK(std::abs(integrand_coefficients(t1, t2, Part::B, c).value(p) - integrand_B(t1, t2, p, c)) <=
          1e-13 * std::abs(B) + 1e-300);
  }
}

TEST_CASE("K keeps a positive real part over the time triangle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto c = barrier_case();
  for (int k = 0; k < 1000; ++k) {
    const double t1 = c.t * u(rng), t2 = t1 * u(rng);
    CHECK(k_a(t1, t2, c).real() > 0.0);
    CHECK(k_b(t1, t2, c).real() > 1.0);
  }
}

TEST_CASE("barrier and its Fourier transform") {
  const auto c = barrier_case();
  CHECK(ref::trapezoid([&](double x) { return barrier(x, c); }, -3, 3, 6000) == doctest::Approx(c.V0).epsilon(1e-12));
  for (double p : {-2.0, 0.0, 1.5}) {
    const Complex ft = ref::trapezoid([&](double x) { return std::exp(Complex(0.0, -p * x)) * barrier(x, c); }, -3,
                                      3, 6000) /
                       std::sqrt(2 * kPi);
    CHECK(std::abs(barrier_fourier(p, c) - ft) < 1e-12);
  }
}

TEST_CASE("zeroth order is a normalized Gaussian, or a point mass without diffusion") {
  const auto c = barrier_case();
  const double total = ref::trapezoid([&](double p) { return std::get<double>(zeroth_order_pdf(p, c)); }, 0, 2, 4000);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  const auto free = zeroth_order_pdf(0.3, barrier_case(0.0));
  REQUIRE(std::holds_alternative<PointMass>(free));
  CHECK(std::get<PointMass>(free).at == 1.0);
}

TEST_CASE("first-order diagonal vanishes term by term and the off-diagonal does not") {
  const auto c = barrier_case(1e-3);
  const PotentialFourier gauss = [&](double q) { return barrier_fourier(q, c); };
  for (double p : {-0.5, 0.9, 1.0, 1.2}) {
    CHECK(first_order_diagonal(p, c) == 0.0);
    const auto terms = first_order_terms(p, p, c, gauss);
    CHECK(std::abs(terms.ket) > 1e-8);
    CHECK(std::abs(terms.total()) < 1e-12);
  }
  const auto off = first_order_terms(1.0, 0.95, c, gauss);
  CHECK(std::abs(off.total()) > 1e-8);
}

TEST_CASE("free reflected part is the D -> 0 limit of the second order") {
  const auto tiny = barrier_case(1e-8);
  for (double p : {-1.0, -0.99, -0.95}) {
    const double limit = reflected_pdf_free(p, barrier_case(0.0));
    CHECK(second_order_pdf(p, tiny).value == doctest::Approx(limit).epsilon(3e-3));
  }
}

TEST_CASE("free reflected peak integrates to the Born value for long times") {
  auto c = barrier_case(0.0);
  c.t = 2000.0;
  const double R = ref::trapezoid([&](double p) { return reflected_pdf_free(p, c); }, -3.0, -0.001, 400000);
  CHECK(R == doctest::Approx(born_reflection(c)).epsilon(2e-3));
  CHECK_THROWS_AS(born_reflection(-1.0, c), DomainError);
}

TEST_CASE("transmitted and reflected totals cancel") {
  const auto tot = second_order_totals(barrier_case());
  CHECK(tot.A < 0.0);
  CHECK(tot.A + tot.B == doctest::Approx(0.0).scale(1e-7 * std::abs(tot.B)));
}

TEST_CASE("time scales are ordered in the momentum-resolved regime") {
  const auto ts = time_scales(barrier_case());
  CHECK(ts.t_E == doctest::Approx(1.0));
  CHECK(ts.t_1 == doctest::Approx(100.0));
  CHECK(ts.t_2 == doctest::Approx(10.0));
  CHECK(ts.t_1 > ts.t_2);
  CHECK(ts.t_2 > ts.t_E);
}

TEST_CASE("domain checks") {
  CHECK_THROWS_AS(second_order_pdf(0.5, barrier_case(0.0)), DomainError);
  auto c = barrier_case(0.1);
  CHECK_THROWS_AS(reflection_probability(c), DomainError);
  c = barrier_case();
  c.a = -1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = barrier_case();
  c.sigma = 1.0;
  CHECK_FALSE(c.warnings().empty());
  CHECK(barrier_case().warnings().empty());
  CHECK(crossing_time(2.0, 1.0, 1.0) == doctest::Approx(4.0 * std::sqrt(kPi / 2.0)));
}

TEST_CASE("parallel momentum grid equals serial") {
  const auto c = barrier_case();
  const std::vector<double> ps{-1.0, -0.2, 0.8, 1.05};
  const auto a = second_order_grid(ps, c);
  const auto b = second_order_grid_serial(ps, c);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].error == b[i].error);
  }
}
