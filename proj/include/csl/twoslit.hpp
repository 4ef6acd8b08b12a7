#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "csl/gaussian.hpp"
#include "csl/params.hpp"

namespace csl::twoslit {

/// Two Gaussian peaks of width sigma at +-mu, observed on a screen after a
/// flight time t.
struct TwoSlitConfig {
  double sigma = 1.0;
  double mu = 5.0;
  double t = 10.0;
  Dynamics dynamics;
  /// CSL localization length 1/sqrt(alpha); only used for validity warnings.
  double localization_length = std::numeric_limits<double>::infinity();
  /// Divide the initial state by its exact trace 1 + exp(-mu^2 / 2 sigma^2).
  bool renormalize = false;

  void validate() const;
  /// Approximation-validity notes; empty when the configuration is well posed.
  std::vector<std::string> warnings() const;
};

/// rho_0(x, y) = psi(x) psi*(y) as four Gaussian terms.
gaussian::GaussianSum initial_state(const TwoSlitConfig& cfg);

/// Exact trace of initial_state without renormalization.
double initial_trace(const TwoSlitConfig& cfg);

/// K = 2 D t^3 / 3 m^2 sigma^2 + hbar^2 t^2 / 4 m^2 sigma^4 + 1.
double spread_factor(const TwoSlitConfig& cfg);

/// D t^3 mu^2 / (3 K m^2 sigma^4), the exponent suppressing the cross term.
double damping_exponent(const TwoSlitConfig& cfg);

/// Fringe wavenumber hbar t mu / (2 m K sigma^4).
double fringe_wavenumber(const TwoSlitConfig& cfg);

/// Closed-form screen density rho_t(x, x).
double screen_pdf(double x, const TwoSlitConfig& cfg);

/// The same pattern without the interference term: the two packets added
/// as a mixture.
double incoherent_pdf(double x, const TwoSlitConfig& cfg);

/// screen_pdf on a sample grid; OpenMP-parallel, with a serial reference.
std::vector<double> screen_pdf_grid(const TwoSlitConfig& cfg, std::span<const double> xs);
std::vector<double> screen_pdf_grid_serial(const TwoSlitConfig& cfg, std::span<const double> xs);

/// m sigma mu / hbar.
double overlap_time(const TwoSlitConfig& cfg);

/// hbar^3 / (m sigma mu^3).
double critical_D(const TwoSlitConfig& cfg);

/// (max - min) / (max + min) of screen_pdf / incoherent_pdf over
/// |x| <= pi / k, i.e. from the central maximum to the first minimum on
/// either side. Dividing out the envelope keeps a washed-out pattern from
/// registering its own slope as contrast.
double fringe_visibility(const TwoSlitConfig& cfg, int samples = 4001);

}  // namespace csl::twoslit
