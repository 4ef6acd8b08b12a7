#include "csl/propagator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "csl/errors.hpp"

namespace csl::propagator {

namespace {

using gaussian::ExponentBuilder;
using gaussian::Index;
using gaussian::RMatrix;
using gaussian::RVector;
constexpr Complex I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("propagator: elapsed time must be > 0");
}

ComplexGaussian position_kernel_gaussian(double dt, const Dynamics& dyn) {
  require_positive_dt(dt);
  dyn.validate();
  const double hbar = dyn.hbar;
  const double m = dyn.mass;
  // variables: 0 = x, 1 = y, 2 = x', 3 = y'
  const Complex kinetic = I * m / (2.0 * hbar * dt);
  const double decoherence = dyn.D * dt / (3.0 * hbar * hbar);
  const gaussian::LinearForm u{{0, 1.0}, {1, -1.0}};
  const gaussian::LinearForm up{{2, 1.0}, {3, -1.0}};
  return ExponentBuilder(4)
      .add_square(kinetic, {{0, 1.0}, {2, -1.0}})
      .add_square(-kinetic, {{1, 1.0}, {3, -1.0}})
      .add_square(-decoherence, u)
      .add_product(-decoherence, u, up)
      .add_square(-decoherence, up)
      .add_constant(std::log(m / (2.0 * kPi * hbar * dt)))
      .build();
}

ComplexGaussian momentum_kernel_gaussian(double dt, const Dynamics& dyn) {
  require_positive_dt(dt);
  dyn.validate();
  if (!(dyn.D > 0.0)) {
    throw DomainError("momentum kernel requires D > 0; use the D = 0 phase-only evolution");
  }
  const double hbar = dyn.hbar;
  const double m = dyn.mass;
  const double D = dyn.D;
  // variables: 0 = p, 1 = q, 2 = p'; q' = p' - p + q
  const gaussian::LinearForm qp{{2, 1.0}, {0, -1.0}, {1, 1.0}};
  const Complex phase = -I * dt / (4.0 * m * hbar);
  return ExponentBuilder(3)
      .add_square(phase, {{0, 1.0}})
      .add_square(-phase, {{1, 1.0}})
      .add_square(phase, {{2, 1.0}})
      .add_square(-phase, qp)
      .add_square(-1.0 / (4.0 * D * dt), {{0, 1.0}, {2, -1.0}})
      .add_square(-D * dt * dt * dt / (12.0 * m * m * hbar * hbar), {{0, 1.0}, {1, -1.0}})
      .add_constant(-0.5 * std::log(4.0 * kPi * D * dt))
      .build();
}

ComplexGaussian evolve_term(const ComplexGaussian& term, const ComplexGaussian& kernel, Representation rep,
                            const Dynamics& dyn, double dt) {
  if (rep == Representation::Position) {
    return gaussian::integrate_out(gaussian::multiply(kernel, gaussian::embed(term, 4, {2, 3})), {2, 3});
  }
  if (dyn.D == 0.0) {
    // Delta limit: pure phase exp{-i dt (p^2 - q^2) / 2 m hbar}.
    const Complex phase = -I * dt / (2.0 * dyn.mass * dyn.hbar);
    const auto free = ExponentBuilder(2).add_square(phase, {{0, 1.0}}).add_square(-phase, {{1, 1.0}}).build();
    return gaussian::multiply(term, free);
  }
  // term(p', q') with q' = p' - p + q, as a function of (p, q, p')
  RMatrix M = RMatrix::Zero(2, 3);
  M(0, 2) = 1.0;
  M(1, 0) = -1.0;
  M(1, 1) = 1.0;
  M(1, 2) = 1.0;
  return gaussian::integrate_out(gaussian::multiply(kernel, gaussian::substitute(term, M)), {2});
}

ComplexGaussian kernel_for(Representation rep, double dt, const Dynamics& dyn) {
  if (rep == Representation::Position) return position_kernel_gaussian(dt, dyn);
  if (dyn.D == 0.0) return ComplexGaussian(3);
  return momentum_kernel_gaussian(dt, dyn);
}

void require_two_variables(const GaussianSum& rho) {
  if (rho.dim() != 2) throw DomainError("density matrix must be a Gaussian sum over two variables");
}

double diagonal(const GaussianSum& rho, double x) {
  require_two_variables(rho);
  const RVector z = RVector::Constant(2, x);
  Complex total{0.0, 0.0};
  double scale = 0.0;
  for (const auto& t : rho.terms()) {
    const Complex v = t.value(z);
    total += v;
    scale += std::abs(v);
  }
  if (std::abs(total.imag()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "hermiticity violation: diagonal element at " << x << " has imaginary part " << total.imag()
       << " against scale " << scale;
    throw NumericalError(os.str());
  }
  return total.real();
}

}  // namespace

ComplexGaussian PropagatorKernel::as_gaussian() const {
  if (representation == Representation::Position) return position_kernel_gaussian(elapsed, dynamics);
  return momentum_kernel_gaussian(elapsed, dynamics);
}

Complex position_kernel(double x, double y, double xp, double yp, double dt, const Dynamics& dyn) {
  RVector z(4);
  z << x, y, xp, yp;
  return position_kernel_gaussian(dt, dyn).value(z);
}

Complex momentum_kernel_reduced(double p, double pp, double dp_minus, double dt, const Dynamics& dyn) {
  RVector z(3);
  z << p, p - dp_minus, pp;
  return momentum_kernel_gaussian(dt, dyn).value(z);
}

GaussianSum evolve(const GaussianSum& rho0, double dt, const Dynamics& dyn, Representation rep) {
  require_two_variables(rho0);
  if (dt == 0.0) return rho0;
  require_positive_dt(dt);
  const ComplexGaussian kernel = kernel_for(rep, dt, dyn);
  const auto& terms = rho0.terms();
  std::vector<ComplexGaussian> out(terms.size());
  const long n = static_cast<long>(terms.size());
  // Results land in input order, so the sum is reproducible.
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = evolve_term(terms[static_cast<std::size_t>(i)], kernel, rep, dyn, dt);
  }
  return GaussianSum(2, std::move(out));
}

GaussianSum evolve_serial(const GaussianSum& rho0, double dt, const Dynamics& dyn, Representation rep) {
  require_two_variables(rho0);
  if (dt == 0.0) return rho0;
  require_positive_dt(dt);
  const ComplexGaussian kernel = kernel_for(rep, dt, dyn);
  GaussianSum out(2);
  for (const auto& t : rho0.terms()) out.add(evolve_term(t, kernel, rep, dyn, dt));
  return out;
}

GaussianSum to_momentum(const GaussianSum& rho_x, double hbar) {
  require_two_variables(rho_x);
  // variables: 0 = p, 1 = q, 2 = x, 3 = y
  const auto phase = ExponentBuilder(4)
                         .add_product(-I / hbar, {{0, 1.0}}, {{2, 1.0}})
                         .add_product(I / hbar, {{1, 1.0}}, {{3, 1.0}})
                         .add_constant(-std::log(2.0 * kPi * hbar))
                         .build();
  return gaussian::transform_terms(rho_x, 2, [&](const ComplexGaussian& t) {
    return gaussian::integrate_out(gaussian::multiply(phase, gaussian::embed(t, 4, {2, 3})), {2, 3});
  });
}

double position_pdf(const GaussianSum& rho, double x) { return diagonal(rho, x); }

double momentum_pdf(const GaussianSum& rho_p, double p) { return diagonal(rho_p, p); }

Complex trace(const GaussianSum& rho) {
  require_two_variables(rho);
  const RMatrix diag = RMatrix::Ones(2, 1);
  Complex total{0.0, 0.0};
  for (const auto& t : rho.terms()) total += gaussian::integrate_all(gaussian::substitute(t, diag));
  return total;
}

std::vector<double> sample_pdf(const GaussianSum& rho, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = position_pdf(rho, xs[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<double> sample_pdf_serial(const GaussianSum& rho, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(position_pdf(rho, x));
  return out;
}

GaussianSum gaussian_packet(double sigma, double x0, double p0, double hbar) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_packet: sigma must be > 0");
  const double w = 1.0 / (4.0 * sigma * sigma);
  auto g = ExponentBuilder(2)
               .add_square(-w, {{0, 1.0}})
               .add_square(-w, {{1, 1.0}})
               .add_linear(2.0 * w * x0 + I * p0 / hbar, {{0, 1.0}})
               .add_linear(2.0 * w * x0 - I * p0 / hbar, {{1, 1.0}})
               .add_constant(-2.0 * w * x0 * x0 - 0.5 * std::log(2.0 * kPi * sigma * sigma))
               .build();
  GaussianSum out(2);
  out.add(std::move(g));
  return out;
}

}  // namespace csl::propagator
