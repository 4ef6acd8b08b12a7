#include "csl/twoparticle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "csl/errors.hpp"
#include "csl/propagator.hpp"

namespace csl::twoparticle {

namespace {

using gaussian::ExponentBuilder;
using gaussian::LinearForm;
using gaussian::RMatrix;
using gaussian::RVector;
constexpr Complex I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// Variable indices of the kernel.
enum : gaussian::Index { X1, Y1, X2, Y2, X1p, Y1p, X2p, Y2p };

struct Coefficients {
  double a;    // hbar^2 t^2 / 4 m^2 sigma^4
  double b;    // 4 D t^3 / 3 m^2 sigma^2
  double c_X;  // a + 1
  double c_xi; // a + b + 1
};

Coefficients coefficients(const TwoParticleConfig& cfg) {
  const auto& d = cfg.dynamics;
  const double s2 = cfg.sigma * cfg.sigma;
  const double mt = d.mass * d.mass;
  const double t = cfg.t;
  const double a = d.hbar * d.hbar * t * t / (4.0 * mt * s2 * s2);
  const double b = 4.0 * d.D * t * t * t / (3.0 * mt * s2);
  return {a, b, a + 1.0, a + b + 1.0};
}

Complex log_at(const ComplexGaussian& g, const KernelPoint& z, int var = -1, double shift = 0.0) {
  RVector v = Eigen::Map<const RVector>(z.data(), 8);
  if (var >= 0) v(var) += shift;
  return g.log_value(v);
}

}  // namespace

void TwoParticleConfig::validate() const {
  dynamics.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("TwoParticleConfig: sigma must be > 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("TwoParticleConfig: t must be >= 0");
  if (!(localization_length > 0.0)) throw DomainError("TwoParticleConfig: localization_length must be > 0");
}

std::vector<std::string> TwoParticleConfig::warnings() const {
  std::vector<std::string> out;
  const auto s = spread_statistics(*this);
  // Relative distances reach about 2 sigma_{xi/2}, coherence lengths about
  // the larger spread; both must stay small against 1/sqrt(alpha).
  const double extent = 2.0 * std::max(s.sigma_X, s.sigma_xi_half);
  if (extent > 0.1 * localization_length) {
    std::ostringstream os;
    os << "quadratic approximation doubtful: spread " << extent << " exceeds 0.1 of the localization length "
       << localization_length;
    out.push_back(os.str());
  }
  return out;
}

ComplexGaussian two_particle_kernel_gaussian(double dt, const Dynamics& dyn) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("two_particle_kernel: elapsed time must be > 0");
  dyn.validate();
  const auto single = propagator::PropagatorKernel{propagator::Representation::Position, dyn, dt}.as_gaussian();
  const double c = dyn.D * dt / (3.0 * dyn.hbar * dyn.hbar);
  auto coupling = [](ExponentBuilder& b, double coeff, gaussian::Index i, gaussian::Index j, gaussian::Index ip,
                     gaussian::Index jp) {
    const LinearForm u{{i, 1.0}, {j, -1.0}};
    const LinearForm up{{ip, 1.0}, {jp, -1.0}};
    b.add_square(coeff, u).add_product(coeff, u, up).add_square(coeff, up);
  };
  ExponentBuilder cross(8);
  coupling(cross, -c, X1, Y2, X1p, Y2p);
  coupling(cross, -c, X2, Y1, X2p, Y1p);
  coupling(cross, c, X1, X2, X1p, X2p);
  coupling(cross, c, Y1, Y2, Y1p, Y2p);
  return gaussian::multiply(gaussian::multiply(gaussian::embed(single, 8, {X1, Y1, X1p, Y1p}),
                                               gaussian::embed(single, 8, {X2, Y2, X2p, Y2p})),
                            cross.build());
}

Complex two_particle_kernel(const KernelPoint& z, double dt, const Dynamics& dyn) {
  return std::exp(log_at(two_particle_kernel_gaussian(dt, dyn), z));
}

GaussianSum initial_state(const TwoParticleConfig& cfg) {
  cfg.validate();
  const auto one = propagator::gaussian_packet(cfg.sigma, 0.0, 0.0, cfg.dynamics.hbar)[0];
  GaussianSum out(4);
  out.add(gaussian::multiply(gaussian::embed(one, 4, {X1, Y1}), gaussian::embed(one, 4, {X2, Y2})));
  return out;
}

GaussianSum evolved_state(const TwoParticleConfig& cfg) {
  const GaussianSum rho0 = initial_state(cfg);
  if (cfg.t == 0.0) return rho0;
  const auto kernel = two_particle_kernel_gaussian(cfg.t, cfg.dynamics);
  return gaussian::transform_terms(rho0, 4, [&](const ComplexGaussian& term) {
    return gaussian::integrate_out(gaussian::multiply(kernel, gaussian::embed(term, 8, {X1p, Y1p, X2p, Y2p})),
                                   {X1p, Y1p, X2p, Y2p});
  });
}

double spread_L(const TwoParticleConfig& cfg) {
  const auto c = coefficients(cfg);
  return c.c_X * c.c_xi;
}

double joint_pdf(double X, double xi, const TwoParticleConfig& cfg) {
  cfg.validate();
  const auto c = coefficients(cfg);
  const double s2 = cfg.sigma * cfg.sigma;
  const double L = c.c_X * c.c_xi;
  const double h = 0.5 * xi;
  return std::exp(-(c.c_X * X * X + c.c_xi * h * h) / (s2 * L)) / (2.0 * kPi * s2 * std::sqrt(L));
}

double joint_pdf_from_kernel(double X, double xi, const TwoParticleConfig& cfg) {
  const GaussianSum rho = evolved_state(cfg);
  const double x1 = X + 0.5 * xi;
  const double x2 = X - 0.5 * xi;
  RVector z(4);
  z << x1, x1, x2, x2;
  const Complex v = gaussian::evaluate(rho, z);
  if (std::abs(v.imag()) > 1e-10 * std::abs(v)) {
    throw NumericalError("joint_pdf_from_kernel: diagonal is not real");
  }
  return v.real();
}

SpreadStatistics spread_statistics(const TwoParticleConfig& cfg) {
  cfg.validate();
  const auto c = coefficients(cfg);
  const double s2 = cfg.sigma * cfg.sigma;
  // sigma^2 L / 2 c_X and sigma^2 L / 2 c_xi, with L = c_X c_xi.
  const double var_X = 0.5 * s2 * c.c_xi;
  const double var_h = 0.5 * s2 * c.c_X;
  const double sX = std::sqrt(var_X);
  const double sh = std::sqrt(var_h);
  return {sX, sh, sX / sh};
}

Exponents asymptotic_exponents(const TwoParticleConfig& cfg, double t_min, double t_max, int samples) {
  cfg.validate();
  if (!(t_min > 0.0) || !(t_max > t_min) || t_max / t_min < 1e3 * (1.0 - 1e-12)) {
    throw DomainError("asymptotic_exponents: time range must span at least three decades");
  }
  if (samples < 2) throw DomainError("asymptotic_exponents: need at least two samples");
  const double lo = std::log(t_max / 10.0);
  const double hi = std::log(t_max);
  double sx = 0, sxx = 0, sX = 0, sxX = 0, sH = 0, sxH = 0;
  TwoParticleConfig c = cfg;
  for (int i = 0; i < samples; ++i) {
    const double lt = lo + (hi - lo) * i / (samples - 1);
    c.t = std::exp(lt);
    const auto s = spread_statistics(c);
    const double lX = std::log(s.sigma_X);
    const double lH = std::log(s.sigma_xi_half);
    sx += lt;
    sxx += lt * lt;
    sX += lX;
    sxX += lt * lX;
    sH += lH;
    sxH += lt * lH;
  }
  const double n = samples;
  const double denom = n * sxx - sx * sx;
  return {(n * sxX - sx * sX) / denom, (n * sxH - sx * sH) / denom};
}

GaussianSum marginal_single(const TwoParticleConfig& cfg) {
  const GaussianSum rho = evolved_state(cfg);
  // (x, y, z) -> (x1, y1, x2, y2) = (x, y, z, z)
  RMatrix M = RMatrix::Zero(4, 3);
  M(X1, 0) = 1.0;
  M(Y1, 1) = 1.0;
  M(X2, 2) = 1.0;
  M(Y2, 2) = 1.0;
  return gaussian::transform_terms(rho, 2, [&](const ComplexGaussian& term) {
    return gaussian::integrate_out(gaussian::substitute(term, M), {2});
  });
}

std::vector<double> joint_pdf_grid(std::span<const double> Xs, std::span<const double> xis,
                                   const TwoParticleConfig& cfg) {
  cfg.validate();
  const long nx = static_cast<long>(Xs.size());
  const std::size_t nxi = xis.size();
  std::vector<double> out(Xs.size() * nxi);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nx; ++i) {
    const auto row = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < nxi; ++j) out[row * nxi + j] = joint_pdf(Xs[row], xis[j], cfg);
  }
  return out;
}

std::vector<double> joint_pdf_grid_serial(std::span<const double> Xs, std::span<const double> xis,
                                          const TwoParticleConfig& cfg) {
  cfg.validate();
  std::vector<double> out;
  out.reserve(Xs.size() * xis.size());
  for (double X : Xs) {
    for (double xi : xis) out.push_back(joint_pdf(X, xi, cfg));
  }
  return out;
}

Residual master_equation_residual(const KernelPoint& z, double dt, const Dynamics& dyn, double h_x, double h_t) {
  if (!(h_x > 0.0)) throw DomainError("master_equation_residual: h_x must be > 0");
  if (h_t == 0.0) h_t = 1e-3 * dt;
  if (!(h_t > 0.0) || !(h_t * 4.0 < dt)) throw DomainError("master_equation_residual: need 0 < 4 h_t < dt");

  // d/dt log J, eighth order.
  static constexpr std::array<double, 4> w{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  Complex E_t{0.0, 0.0};
  for (int k = 1; k <= 4; ++k) {
    const double off = k * h_t;
    E_t += w[static_cast<std::size_t>(k - 1)] *
           (log_at(two_particle_kernel_gaussian(dt + off, dyn), z) - log_at(two_particle_kernel_gaussian(dt - off, dyn), z));
  }
  E_t /= h_t;

  // The log kernel is quadratic in space, so second-order differences are exact up to rounding.
  const auto g = two_particle_kernel_gaussian(dt, dyn);
  const Complex E0 = log_at(g, z);
  auto laplace_term = [&](int var) {
    const Complex plus = log_at(g, z, var, h_x);
    const Complex minus = log_at(g, z, var, -h_x);
    const Complex d1 = (plus - minus) / (2.0 * h_x);
    const Complex d2 = (plus - 2.0 * E0 + minus) / (h_x * h_x);
    return d2 + d1 * d1;
  };
  const Complex kin = I * dyn.hbar / (2.0 * dyn.mass);
  const std::array<Complex, 4> kinetic{kin * laplace_term(X1), -kin * laplace_term(Y1), kin * laplace_term(X2),
                                       -kin * laplace_term(Y2)};
  const double x1 = z[X1], y1 = z[Y1], x2 = z[X2], y2 = z[Y2];
  auto sq = [](double v) { return v * v; };
  const double Q = sq(x1 - y1) + sq(x1 - y2) + sq(x2 - y1) + sq(x2 - y2) - sq(x1 - x2) - sq(y1 - y2);
  const double decoherence = -dyn.D / (dyn.hbar * dyn.hbar) * Q;

  Complex rhs = decoherence;
  double scale = std::abs(E_t) + std::abs(decoherence);
  for (const auto& k : kinetic) {
    rhs += k;
    scale += std::abs(k);
  }
  return {std::abs(E_t - rhs), scale};
}

}  // namespace csl::twoparticle
