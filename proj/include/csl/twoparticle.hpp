#pragma once

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "csl/gaussian.hpp"
#include "csl/params.hpp"

namespace csl::twoparticle {

using gaussian::Complex;
using gaussian::ComplexGaussian;
using gaussian::GaussianSum;

/// Two identical bosons released at t = 0 from the same Gaussian state of
/// position variance sigma^2 each.
struct TwoParticleConfig {
  double sigma = 1.0;
  double t = 0.0;
  Dynamics dynamics;
  /// 1/sqrt(alpha); only used for the validity warning.
  double localization_length = std::numeric_limits<double>::infinity();

  void validate() const;
  std::vector<std::string> warnings() const;
};

/// Coordinates of the kernel, unprimed then primed:
/// (x1, y1, x2, y2, x1', y1', x2', y2').
using KernelPoint = std::array<double, 8>;

/// The two-particle kernel as a Gaussian over the eight coordinates.
ComplexGaussian two_particle_kernel_gaussian(double dt, const Dynamics& dyn);
/// Product of the one-particle kernels times the four cross-coupling factors.
Complex two_particle_kernel(const KernelPoint& z, double dt, const Dynamics& dyn);

/// psi(x1, x2) psi*(y1, y2) over (x1, y1, x2, y2).
GaussianSum initial_state(const TwoParticleConfig& cfg);

/// rho_t over (x1, y1, x2, y2), obtained by integrating the kernel against
/// the initial state.
GaussianSum evolved_state(const TwoParticleConfig& cfg);

/// Closed-form P_t(X, xi), X = (x1 + x2) / 2, xi = x1 - x2.
double joint_pdf(double X, double xi, const TwoParticleConfig& cfg);
/// Same quantity from evolved_state evaluated at x1 = y1, x2 = y2.
double joint_pdf_from_kernel(double X, double xi, const TwoParticleConfig& cfg);

/// L = c_X c_xi with c_X = hbar^2 t^2 / 4 m^2 sigma^4 + 1 and
/// c_xi = 4 D t^3 / 3 m^2 sigma^2 + c_X.
double spread_L(const TwoParticleConfig& cfg);

struct SpreadStatistics {
  double sigma_X = 0.0;
  double sigma_xi_half = 0.0;
  double ratio = 1.0;
};
SpreadStatistics spread_statistics(const TwoParticleConfig& cfg);

struct Exponents {
  double slope_X = 0.0;
  double slope_xi_half = 0.0;
};
/// Least-squares log-log slopes over the top decade [t_max / 10, t_max].
/// The range must span at least three decades.
Exponents asymptotic_exponents(const TwoParticleConfig& cfg, double t_min, double t_max, int samples = 64);

/// One-particle density matrix over (x, y) after tracing out particle 2.
GaussianSum marginal_single(const TwoParticleConfig& cfg);

/// joint_pdf over the grid Xs x xis, row-major in X. OpenMP-parallel.
std::vector<double> joint_pdf_grid(std::span<const double> Xs, std::span<const double> xis,
                                   const TwoParticleConfig& cfg);
std::vector<double> joint_pdf_grid_serial(std::span<const double> Xs, std::span<const double> xis,
                                          const TwoParticleConfig& cfg);

/// Residual of the two-particle master equation applied to the kernel at z,
/// as a fraction of the summed magnitudes of its terms. Spatial derivatives
/// are finite differences of the log kernel, the time derivative an
/// eighth-order central difference with step h_t.
struct Residual {
  double residual = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? residual / scale : residual; }
};
Residual master_equation_residual(const KernelPoint& z, double dt, const Dynamics& dyn, double h_x = 1e-2,
                                  double h_t = 0.0);

}  // namespace csl::twoparticle
