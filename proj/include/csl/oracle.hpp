#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "csl/gaussian.hpp"
#include "csl/params.hpp"

namespace csl::oracle {

using gaussian::Complex;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Uniform periodic grid x_i = x0 + i dx, i = 0 .. n-1.
struct Grid {
  int n = 256;
  double x0 = -16.0;
  double dx = 0.125;

  /// Grid of n points centred on zero with the given total length.
  static Grid centred(int n, double length);

  double x(int i) const { return x0 + i * dx; }
  /// Angular wavenumber of FFT bin i.
  double k(int i) const;
  /// n >= 64, even, dx > 0.
  void validate() const;
  bool operator==(const Grid& o) const { return n == o.n && x0 == o.x0 && dx == o.dx; }
};

/// rho(x_i, y_j) stored as values(i, j).
struct GridDensity {
  Grid grid;
  CMatrix values;
  double time = 0.0;

  /// sum_i rho(x_i, x_i) dx.
  Complex trace() const;
  std::vector<double> diagonal() const;
};

enum class DecoherenceForm { Quadratic, Exponential };

/// Right-hand side of the one-particle master equation,
///   d rho / dt = (i hbar / 2m)(d_x^2 - d_y^2) rho - (i / hbar)(V(x) - V(y)) rho - Gamma(x - y) rho,
/// with Gamma(u) = D u^2 / hbar^2 (quadratic) or
/// lambda (1 - exp(-alpha u^2 / 4)), lambda = 4 D / (alpha hbar^2) (exponential).
struct MasterSettings {
  Dynamics dynamics;
  DecoherenceForm form = DecoherenceForm::Quadratic;
  /// Required finite for the exponential form.
  double alpha = std::numeric_limits<double>::infinity();
  /// V(x_i); empty means V = 0.
  std::vector<double> potential;
  /// Switches the kinetic step off, leaving pure decoherence.
  bool kinetic = true;
  /// Abort when |rho| on the border exceeds this fraction of max |rho|.
  double boundary_tol = 1e-10;
  /// Abort when the spectrum above 3/4 of the Nyquist wavenumber exceeds
  /// this fraction of its maximum.
  double resolution_tol = 1e-10;

  void validate(const Grid& grid) const;
  double gamma(double u) const;
};

/// Samples a Gaussian-sum density matrix on the grid.
GridDensity sample(const gaussian::GaussianSum& rho, const Grid& grid, double time = 0.0);

/// One Strang step: half decoherence and potential, exact spectral kinetic
/// step, half decoherence and potential. The scheme is unconditionally
/// stable, so dt only has to be positive and finite. Checks hermiticity,
/// trace, border density and spectral resolution afterwards.
GridDensity step_master(const GridDensity& rho, double dt, const MasterSettings& settings);

/// Repeated step_master up to t_final in steps of at most dt.
GridDensity evolve_master(GridDensity rho, double t_final, double dt, const MasterSettings& settings);

/// A single stochastic wavefunction on the grid.
struct SdeTrajectory {
  Grid grid;
  CVector psi;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  double time = 0.0;
  std::mt19937_64 rng;

  SdeTrajectory(const Grid& g, CVector psi0, std::uint64_t seed, std::uint64_t index);
};

struct SdeSettings {
  Dynamics dynamics;
  /// Largest tolerated |norm^2 - 1| before renormalization.
  double max_norm_drift = 1e-2;
};

/// One step of
///   d psi = [-i H / hbar - (D / hbar^2)(x - <x>)^2] psi dt + (sqrt(2D) / hbar)(x - <x>) psi dW,
/// as the exact exponential of the noise and damping terms followed by a
/// spectral kinetic step, then renormalization.
void step_sde(SdeTrajectory& traj, double dt, const SdeSettings& settings);

/// Seeds the generator of trajectory `index` from (seed, index) by splitmix64.
std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index);

/// Average of |psi><psi| over n_traj trajectories run to t_final. The
/// trajectories run in parallel; the reduction is a fixed pairwise sum, so
/// the result does not depend on the thread count.
GridDensity ensemble_average(const Grid& grid, const CVector& psi0, double t_final, double dt,
                             const SdeSettings& settings, int n_traj, std::uint64_t seed);
GridDensity ensemble_average_serial(const Grid& grid, const CVector& psi0, double t_final, double dt,
                                    const SdeSettings& settings, int n_traj, std::uint64_t seed);

/// psi(x_i) of a Gaussian packet with |psi|^2 of variance sigma^2.
CVector gaussian_wavefunction(const Grid& grid, double sigma, double x0 = 0.0, double p0 = 0.0, double hbar = 1.0);

struct Comparison {
  double l2_error = 0.0;
  double sup_error = 0.0;
  double trace_gap = 0.0;
};
/// Errors of a against the reference b: l2 and sup norms of a - b relative
/// to those of b, and |tr a - tr b|.
Comparison compare(const GridDensity& a, const GridDensity& b);
/// Same with the reference sampled from an analytic density matrix.
Comparison compare(const GridDensity& a, const gaussian::GaussianSum& b);

/// 1/2 || (a - b) dx ||_1 over the eigenvalues of the hermitian part.
double trace_distance(const GridDensity& a, const GridDensity& b);

}  // namespace csl::oracle
