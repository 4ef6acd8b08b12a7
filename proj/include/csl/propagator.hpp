#pragma once

#include <span>
#include <vector>

#include "csl/gaussian.hpp"
#include "csl/params.hpp"

namespace csl::propagator {

using gaussian::Complex;
using gaussian::ComplexGaussian;
using gaussian::GaussianSum;

enum class Representation { Position, Momentum };

/// Density-matrix propagator of the quadratic-limit master equation over an
/// elapsed time dt > 0.
///
/// Position form, variables (x, y, x', y'):
///   m/(2 pi hbar dt) exp{(i m / 2 hbar dt)[(x-x')^2 - (y-y')^2]}
///                    exp{-(D dt / 3 hbar^2)[(x-y)^2 + (x-y)(x'-y') + (x'-y')^2]}
///
/// Momentum form: the kernel carries delta(p - q - p' + q'), which is
/// resolved by fixing q' = p' - (p - q). What remains is a Gaussian over
/// (p, q, p') normalized so that the p = q slice integrates to one over p,
/// with the convention <x|p> = exp(i p x / hbar) / sqrt(2 pi hbar).
struct PropagatorKernel {
  Representation representation = Representation::Position;
  Dynamics dynamics;
  double elapsed = 1.0;

  /// Kernel as a Gaussian over (x, y, x', y') or (p, q, p').
  ComplexGaussian as_gaussian() const;
};

Complex position_kernel(double x, double y, double xp, double yp, double dt, const Dynamics& dyn);

/// Momentum kernel with the delta function resolved; dp_minus = p - q = p' - q'.
/// Requires D > 0.
Complex momentum_kernel_reduced(double p, double pp, double dp_minus, double dt, const Dynamics& dyn);

/// rho_t = J(dt) rho_0 term by term. The state is interpreted in the given
/// representation, dt == 0 returns the input unchanged.
GaussianSum evolve(const GaussianSum& rho0, double dt, const Dynamics& dyn,
                   Representation rep = Representation::Position);
/// Single-threaded reference for evolve.
GaussianSum evolve_serial(const GaussianSum& rho0, double dt, const Dynamics& dyn,
                          Representation rep = Representation::Position);

/// rho(p, q) = (1 / 2 pi hbar) int dx dy exp(-i p x / hbar) rho(x, y) exp(i q y / hbar).
GaussianSum to_momentum(const GaussianSum& rho_x, double hbar);

/// rho(x, x), after checking that the imaginary part is below 1e-10 of the
/// summed term magnitudes. Same function serves rho(p, p).
double position_pdf(const GaussianSum& rho, double x);
double momentum_pdf(const GaussianSum& rho_p, double p);

/// Trace int dx rho(x, x), done analytically.
Complex trace(const GaussianSum& rho);

/// Diagonal sampled at each x. OpenMP-parallel over samples.
std::vector<double> sample_pdf(const GaussianSum& rho, std::span<const double> xs);
std::vector<double> sample_pdf_serial(const GaussianSum& rho, std::span<const double> xs);

/// Pure Gaussian packet psi(x) psi*(y) with |psi|^2 of variance sigma^2,
/// centred at x0 and carrying mean momentum p0.
GaussianSum gaussian_packet(double sigma, double x0, double p0, double hbar);

}  // namespace csl::propagator
