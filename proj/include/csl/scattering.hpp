#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "csl/gaussian.hpp"
#include "csl/params.hpp"
#include "csl/quadrature.hpp"

namespace csl::scattering {

using gaussian::Complex;
using quad::QuadratureSpec;

/// Plane wave of momentum pbar crossing the Gaussian barrier
/// V(x) = V0 (2 pi a^2)^(-1/2) exp(-x^2 / 2 a^2) during a time t.
struct ScatteringConfig {
  double pbar = 1.0;
  double V0 = 0.01;
  double a = 0.1;
  double t = 100.0;
  /// Packet width behind the plane-wave limit. NaN skips the p sigma / hbar check.
  double sigma = std::numeric_limits<double>::quiet_NaN();
  Dynamics dynamics = Dynamics::natural(1e-4);
  /// Drops the 4 D a^2 t / hbar^2 term from K_A (and so from K_B).
  bool drop_width_term = false;

  void validate() const;
  std::vector<std::string> warnings() const;
};

/// t = 2 m xbar / pbar with xbar = sqrt(pi / 2) sigma.
double crossing_time(double sigma, double pbar, double mass);

/// V(x) of the Gaussian barrier, normalized so that its integral is V0.
double barrier(double x, const ScatteringConfig& cfg);

/// (2 pi hbar)^(-1/2) int dx exp(-i p x / hbar) V(x).
Complex barrier_fourier(double p, const ScatteringConfig& cfg);

/// Unit point mass at `at`, the D t = 0 limit of the zeroth order.
struct PointMass {
  double at = 0.0;
};
using Distribution = std::variant<double, PointMass>;

/// (4 pi D t)^(-1/2) exp{-(p - pbar)^2 / 4 D t}, or a PointMass at pbar when D t = 0.
Distribution zeroth_order_pdf(double p, const ScatteringConfig& cfg);

/// The first-order diagonal. The two potential terms carry the same factor
/// V(0) when p = q and cancel identically, so this is 0 by construction.
double first_order_diagonal(double p, const ScatteringConfig& cfg);

/// The two first-order contributions to rho(p, q), from V acting on the ket
/// and on the bra side. Computed with the Gaussian engine for the inner
/// momentum integral and adaptive quadrature for the time integral.
struct FirstOrderTerms {
  Complex ket;
  Complex bra;
  Complex total() const { return ket + bra; }
};
using PotentialFourier = std::function<Complex(double)>;
FirstOrderTerms first_order_terms(double p, double q, const ScatteringConfig& cfg,
                                  const PotentialFourier& potential, const QuadratureSpec& quad = {});

/// K_A and K_B at (t1, t2) with t2 <= t1.
Complex k_a(double t1, double t2, const ScatteringConfig& cfg);
Complex k_b(double t1, double t2, const ScatteringConfig& cfg);

enum class Part { A, B };

/// The integrand as exp(-alpha p^2 + beta p + gamma) / sqrt(K), prefactor
/// included in gamma, so that the time integral of value(p) over the
/// triangle 0 <= t2 <= t1 <= t gives A_t(p, p) or B_t(p, p).
struct IntegrandCoefficients {
  Complex alpha;
  Complex beta;
  Complex gamma;
  Complex K;
  Complex value(double p) const;
};
/// Throws NumericalError when K leaves the half plane where the principal
/// square root is continuous.
IntegrandCoefficients integrand_coefficients(double t1, double t2, Part part, const ScatteringConfig& cfg);

Complex integrand_A(double t1, double t2, double p, const ScatteringConfig& cfg);
Complex integrand_B(double t1, double t2, double p, const ScatteringConfig& cfg);

/// Breakpoints in t1 - t2 used by the time quadrature: a geometric ladder
/// reaching below the shortest time scale of the integrands.
std::vector<double> time_breakpoints(const ScatteringConfig& cfg);

struct PdfValue {
  double value = 0.0;
  double error = 0.0;
};

/// rho^(2)(p, p) = 2 Re A + 2 Re B. Requires D > 0; at D = 0 the transmitted
/// part is a point mass and reflected_pdf_free gives the reflected part.
/// An abs_tol of 0 in `quad` is replaced by a floor scaled to the problem.
PdfValue second_order_pdf(double p, const ScatteringConfig& cfg, const QuadratureSpec& quad = {});

/// second_order_pdf at each p. OpenMP-parallel over samples.
std::vector<PdfValue> second_order_grid(std::span<const double> ps, const ScatteringConfig& cfg,
                                        const QuadratureSpec& quad = {});
std::vector<PdfValue> second_order_grid_serial(std::span<const double> ps, const ScatteringConfig& cfg,
                                               const QuadratureSpec& quad = {});

/// 2 Re B at D = 0 in closed form:
/// (m V0^2 / pi hbar^3 pbar t) exp{-a^2 (p - pbar)^2 / hbar^2} (1 - cos w t) / w^2,
/// w = (p^2 - pbar^2) / 2 m hbar.
double reflected_pdf_free(double p, const ScatteringConfig& cfg);

/// (V0^2 m^2 / hbar^2 p^2) exp{-4 a^2 p^2 / hbar^2}. Throws DomainError unless p > 0.
double born_reflection(double p, const ScatteringConfig& cfg);
/// born_reflection at pbar.
double born_reflection(const ScatteringConfig& cfg);

struct TimeScales {
  double t_E = 0.0;
  double t_1 = 0.0;
  double t_2 = 0.0;
};
/// t_E = m hbar / pbar^2, t_1 = m hbar / D t, t_2 = m hbar / (pbar sqrt(D t)).
TimeScales time_scales(const ScatteringConfig& cfg);

struct Reflection {
  double probability = 0.0;
  double width = 0.0;
  double error = 0.0;
};
/// Integral of second_order_pdf over p < 0 and the standard deviation of the
/// reflected peak. The p integral is done in closed form per (t1, t2).
/// Throws DomainError when pbar < 3 sqrt(D t), the peaks then overlap.
Reflection reflection_probability(const ScatteringConfig& cfg, const QuadratureSpec& quad = {});

/// Full-line integrals of 2 Re A and 2 Re B, in closed form over p.
struct SecondOrderTotals {
  double A = 0.0;
  double B = 0.0;
  double error = 0.0;
};
SecondOrderTotals second_order_totals(const ScatteringConfig& cfg, const QuadratureSpec& quad = {});

/// Numerical integral of second_order_pdf over [p_lo, p_hi].
PdfValue integrate_second_order(double p_lo, double p_hi, const ScatteringConfig& cfg,
                                const QuadratureSpec& p_quad, const QuadratureSpec& t_quad = {});

/// Warning when |second order| exceeds 20% of the zeroth order peak on the samples.
std::vector<std::string> perturbation_warnings(const ScatteringConfig& cfg, std::span<const PdfValue> second);

}  // namespace csl::scattering
