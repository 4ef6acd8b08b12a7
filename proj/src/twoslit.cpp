#include "csl/twoslit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csl/errors.hpp"

namespace csl::twoslit {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void TwoSlitConfig::validate() const {
  if (!(sigma > 0.0) || !(mu > 0.0) || !(t >= 0.0)) {
    throw DomainError("two-slit config: sigma and mu must be > 0 and t >= 0");
  }
  dynamics.validate();
}

std::vector<std::string> TwoSlitConfig::warnings() const {
  std::vector<std::string> out;
  if (mu <= sigma) {
    out.push_back("two-slit: mu <= sigma, the peaks overlap and the initial state is not normalized");
  }
  if (std::isfinite(localization_length) && 2.0 * mu > 0.5 * localization_length) {
    out.push_back("two-slit: slit separation 2*mu is comparable to 1/sqrt(alpha); "
                  "the large localization length approximation is strained");
  }
  return out;
}

double initial_trace(const TwoSlitConfig& cfg) {
  return 1.0 + std::exp(-cfg.mu * cfg.mu / (2.0 * cfg.sigma * cfg.sigma));
}

gaussian::GaussianSum initial_state(const TwoSlitConfig& cfg) {
  cfg.validate();
  const double s2 = cfg.sigma * cfg.sigma;
  // |N|^2 with N = 1/sqrt(2) (2 pi sigma^2)^(-1/4)
  double log_norm = -std::log(2.0) - 0.5 * std::log(2.0 * kPi * s2);
  if (cfg.renormalize) log_norm -= std::log(initial_trace(cfg));
  const double w = 1.0 / (4.0 * s2);
  gaussian::GaussianSum rho(2);
  for (double a : {cfg.mu, -cfg.mu}) {
    for (double b : {cfg.mu, -cfg.mu}) {
      rho.add(gaussian::ExponentBuilder(2)
                  .add_square(-w, {{0, 1.0}})
                  .add_linear(2.0 * w * a, {{0, 1.0}})
                  .add_square(-w, {{1, 1.0}})
                  .add_linear(2.0 * w * b, {{1, 1.0}})
                  .add_constant(-w * (a * a + b * b) + log_norm)
                  .build());
    }
  }
  return rho;
}

double spread_factor(const TwoSlitConfig& cfg) {
  const auto& d = cfg.dynamics;
  const double s2 = cfg.sigma * cfg.sigma;
  const double m2 = d.mass * d.mass;
  const double t = cfg.t;
  return 2.0 * d.D * t * t * t / (3.0 * m2 * s2) + d.hbar * d.hbar * t * t / (4.0 * m2 * s2 * s2) + 1.0;
}

double damping_exponent(const TwoSlitConfig& cfg) {
  const auto& d = cfg.dynamics;
  const double s4 = std::pow(cfg.sigma, 4);
  return d.D * std::pow(cfg.t, 3) * cfg.mu * cfg.mu / (3.0 * spread_factor(cfg) * d.mass * d.mass * s4);
}

double fringe_wavenumber(const TwoSlitConfig& cfg) {
  const auto& d = cfg.dynamics;
  return d.hbar * cfg.t * cfg.mu / (2.0 * d.mass * spread_factor(cfg) * std::pow(cfg.sigma, 4));
}

double screen_pdf(double x, const TwoSlitConfig& cfg) {
  const double K = spread_factor(cfg);
  const double var = K * cfg.sigma * cfg.sigma;
  const double mu = cfg.mu;
  const double xm = (x - mu) * (x - mu);
  const double xp = (x + mu) * (x + mu);
  const double peaks = std::exp(-xm / (2.0 * var)) + std::exp(-xp / (2.0 * var));
  const double cross = 2.0 * std::cos(fringe_wavenumber(cfg) * x) *
                       std::exp(-(xm + xp) / (4.0 * var) - damping_exponent(cfg));
  double value = 0.5 / std::sqrt(2.0 * kPi * var) * (peaks + cross);
  if (cfg.renormalize) value /= initial_trace(cfg);
  return value;
}

double incoherent_pdf(double x, const TwoSlitConfig& cfg) {
  const double var = spread_factor(cfg) * cfg.sigma * cfg.sigma;
  const double peaks = std::exp(-(x - cfg.mu) * (x - cfg.mu) / (2.0 * var)) +
                       std::exp(-(x + cfg.mu) * (x + cfg.mu) / (2.0 * var));
  double value = 0.5 / std::sqrt(2.0 * kPi * var) * peaks;
  if (cfg.renormalize) value /= initial_trace(cfg);
  return value;
}

std::vector<double> screen_pdf_grid(const TwoSlitConfig& cfg, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = screen_pdf(xs[static_cast<std::size_t>(i)], cfg);
  return out;
}

std::vector<double> screen_pdf_grid_serial(const TwoSlitConfig& cfg, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(screen_pdf(x, cfg));
  return out;
}

double overlap_time(const TwoSlitConfig& cfg) {
  return cfg.dynamics.mass * cfg.sigma * cfg.mu / cfg.dynamics.hbar;
}

double critical_D(const TwoSlitConfig& cfg) {
  return std::pow(cfg.dynamics.hbar, 3) / (cfg.dynamics.mass * cfg.sigma * std::pow(cfg.mu, 3));
}

double fringe_visibility(const TwoSlitConfig& cfg, int samples) {
  cfg.validate();
  if (samples < 3) throw DomainError("fringe_visibility: need at least 3 samples");
  const double k = fringe_wavenumber(cfg);
  if (!(k > 0.0)) return 0.0;  // t = 0: no fringes have formed
  const double half_period = kPi / k;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < samples; ++i) {
    const double x = -half_period + 2.0 * half_period * i / (samples - 1);
    const double v = screen_pdf(x, cfg) / incoherent_pdf(x, cfg);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return (hi - lo) / (hi + lo);
}

}  // namespace csl::twoslit
