#include "csl/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "csl/errors.hpp"
#include "csl/propagator.hpp"
#include "csl/special.hpp"

namespace csl::scattering {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

double prefactor_magnitude(const ScatteringConfig& cfg) {
  const auto& d = cfg.dynamics;
  return d.mass * cfg.V0 * cfg.V0 / (2.0 * kPi * d.hbar * d.hbar * d.hbar * cfg.pbar * cfg.t);
}

// Bound on |A| and |B| for K of order one: |prefactor| times the triangle area.
double integral_scale(const ScatteringConfig& cfg) { return prefactor_magnitude(cfg) * 0.5 * cfg.t * cfg.t; }

QuadratureSpec with_floor(QuadratureSpec q, double scale) {
  if (q.abs_tol == 0.0) q.abs_tol = 1e-3 * q.rel_tol * scale;
  return q;
}

void require_diffusion(const ScatteringConfig& cfg, const char* what) {
  if (!(cfg.dynamics.D > 0.0)) {
    throw DomainError(std::string(what) +
                      ": requires D > 0; at D = 0 the transmitted part is a point mass, use reflected_pdf_free");
  }
}

// Moments of 2 (A + B) over p < 0, summed over the time triangle.
struct MomentSum {
  Complex m0, m1, m2;
  double p_scale = 1.0;

  MomentSum& operator+=(const MomentSum& o) {
    m0 += o.m0;
    m1 += o.m1;
    m2 += o.m2;
    p_scale = std::max(p_scale, o.p_scale);
    return *this;
  }
  friend MomentSum operator+(MomentSum x, const MomentSum& y) { return x += y; }
  friend MomentSum operator-(MomentSum x, const MomentSum& y) {
    x.m0 -= y.m0;
    x.m1 -= y.m1;
    x.m2 -= y.m2;
    x.p_scale = std::max(x.p_scale, y.p_scale);
    return x;
  }
  friend MomentSum operator*(MomentSum x, double w) {
    x.m0 *= w;
    x.m1 *= w;
    x.m2 *= w;
    return x;
  }
  friend MomentSum operator*(double w, MomentSum x) { return x * w; }
};

double magnitude(const MomentSum& m) {
  return std::abs(m.m0) + std::abs(m.m1) / m.p_scale + std::abs(m.m2) / (m.p_scale * m.p_scale);
}

template <class F>
std::vector<PdfValue> grid_parallel(std::span<const double> ps, F&& eval) {
  std::vector<PdfValue> out(ps.size());
  std::exception_ptr failure;
  const long n = static_cast<long>(ps.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = eval(ps[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(csl_scattering_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

void ScatteringConfig::validate() const {
  dynamics.validate();
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("ScatteringConfig: ") + name + " must be > 0");
  };
  positive(pbar, "pbar");
  positive(a, "a");
  positive(t, "t");
  if (!std::isfinite(V0)) throw DomainError("ScatteringConfig: V0 must be finite");
  if (!std::isnan(sigma)) positive(sigma, "sigma");
}

std::vector<std::string> ScatteringConfig::warnings() const {
  std::vector<std::string> out;
  const double hbar = dynamics.hbar;
  if (!std::isnan(sigma) && pbar * sigma / hbar < 10.0) {
    std::ostringstream os;
    os << "plane-wave limit doubtful: pbar sigma / hbar = " << pbar * sigma / hbar << " < 10";
    out.push_back(os.str());
  }
  const double spread = std::sqrt(dynamics.D * t);
  if (pbar < 5.0 * spread) {
    std::ostringstream os;
    os << "momentum diffusion not small: pbar / sqrt(D t) = " << pbar / spread << " < 5";
    out.push_back(os.str());
  }
  return out;
}

double crossing_time(double sigma, double pbar, double mass) {
  if (!(sigma > 0.0) || !(pbar > 0.0) || !(mass > 0.0)) {
    throw DomainError("crossing_time: sigma, pbar and mass must be > 0");
  }
  return 2.0 * mass * std::sqrt(kPi / 2.0) * sigma / pbar;
}

double barrier(double x, const ScatteringConfig& cfg) {
  return cfg.V0 / std::sqrt(2.0 * kPi * cfg.a * cfg.a) * std::exp(-x * x / (2.0 * cfg.a * cfg.a));
}

Complex barrier_fourier(double p, const ScatteringConfig& cfg) {
  const double hbar = cfg.dynamics.hbar;
  return cfg.V0 / std::sqrt(2.0 * kPi * hbar) * std::exp(-cfg.a * cfg.a * p * p / (2.0 * hbar * hbar));
}

Distribution zeroth_order_pdf(double p, const ScatteringConfig& cfg) {
  cfg.validate();
  const double Dt = cfg.dynamics.D * cfg.t;
  if (Dt == 0.0) return PointMass{cfg.pbar};
  const double dp = p - cfg.pbar;
  return std::exp(-dp * dp / (4.0 * Dt)) / std::sqrt(4.0 * kPi * Dt);
}

double first_order_diagonal(double /*p*/, const ScatteringConfig& cfg) {
  cfg.validate();
  return 0.0;
}

FirstOrderTerms first_order_terms(double p, double q, const ScatteringConfig& cfg, const PotentialFourier& potential,
                                  const QuadratureSpec& quad) {
  cfg.validate();
  require_diffusion(cfg, "first_order_terms");
  const auto& dyn = cfg.dynamics;
  const double hbar = dyn.hbar;
  const double delta = p - q;
  // Plane-wave weight sqrt(2 pi) hbar / sigma, with sigma tied to t.
  const double weight = 2.0 * kPi * dyn.mass * hbar / (cfg.pbar * cfg.t);
  const Complex vd = potential(delta);
  const Complex coupling = -I / hbar * weight / std::sqrt(2.0 * kPi * hbar) * vd;

  using gaussian::CVector;
  using gaussian::RMatrix;
  RMatrix outer_map = RMatrix::Zero(3, 1);
  outer_map(2, 0) = 1.0;
  RMatrix inner_map = RMatrix::Zero(3, 1);
  inner_map(0, 0) = 1.0;
  inner_map(1, 0) = 1.0;
  CVector inner_shift = CVector::Zero(3);
  inner_shift(2) = cfg.pbar;

  // At time t1 the state is diagonal, supported on p1 = q1 = k. V on the ket
  // moves it to (k + delta, k), V on the bra to (k, k - delta).
  auto term = [&](double t1, double ket_shift) {
    const auto later = propagator::PropagatorKernel{propagator::Representation::Momentum, dyn, cfg.t - t1}.as_gaussian();
    const auto earlier = propagator::PropagatorKernel{propagator::Representation::Momentum, dyn, t1}.as_gaussian();
    CVector outer_shift(3);
    outer_shift << p, q, ket_shift;
    return gaussian::integrate_all(gaussian::multiply(gaussian::substitute(later, outer_map, outer_shift),
                                                      gaussian::substitute(earlier, inner_map, inner_shift)));
  };
  QuadratureSpec q_spec = quad;
  auto ket = quad::integrate<Complex>([&](double t1) { return term(t1, delta); }, 0.0, cfg.t, q_spec);
  auto bra = quad::integrate<Complex>([&](double t1) { return term(t1, 0.0); }, 0.0, cfg.t, q_spec);
  return {coupling * ket.value, -coupling * bra.value};
}

Complex k_a(double t1, double t2, const ScatteringConfig& cfg) {
  const auto& d = cfg.dynamics;
  const double hbar = d.hbar;
  const double m = d.mass;
  const double D = d.D;
  const double t = cfg.t;
  const double s = t1 - t2;
  const double width = cfg.drop_width_term ? 0.0 : 4.0 * D * cfg.a * cfg.a * t / (hbar * hbar);
  const double re = width + D * D / (3.0 * m * m * hbar * hbar) * s * s *
                                (4.0 * (t1 + 2.0 * t2) * t - 3.0 * (t1 + t2) * (t1 + t2));
  return {re, -2.0 * D / (m * hbar) * s * t};
}

Complex k_b(double t1, double t2, const ScatteringConfig& cfg) {
  const auto& d = cfg.dynamics;
  return 1.0 + k_a(t1, t2, cfg) + I * (2.0 * d.D / (d.mass * d.hbar)) * (t1 - t2) * (t1 + t2);
}

Complex IntegrandCoefficients::value(double p) const {
  return std::exp(-alpha * p * p + beta * p + gamma) / std::sqrt(K);
}

IntegrandCoefficients integrand_coefficients(double t1, double t2, Part part, const ScatteringConfig& cfg) {
  const auto& d = cfg.dynamics;
  const double hbar = d.hbar;
  const double m = d.mass;
  const double pb = cfg.pbar;
  const double t = cfg.t;
  const double s = t1 - t2;

  const Complex K = part == Part::A ? k_a(t1, t2, cfg) : k_b(t1, t2, cfg);
  if (K.real() < 0.0 || K == 0.0) {
    std::ostringstream os;
    os << "square-root branch lost: K_" << (part == Part::A ? 'A' : 'B') << " = " << K << " at (t1, t2) = (" << t1
       << ", " << t2 << ")";
    throw NumericalError(os.str());
  }

  IntegrandCoefficients c{};
  c.K = K;
  // -a^2 (p - pbar)^2 / K hbar^2
  const Complex w = cfg.a * cfg.a / (K * hbar * hbar);
  c.alpha += w;
  c.beta += 2.0 * w * pb;
  c.gamma -= w * pb * pb;
  // i s (p - pbar)^2 / 2 K m hbar  or  i s (p^2 - pbar^2) / 2 K m hbar
  const Complex ph = I * s / (2.0 * K * m * hbar);
  c.alpha -= ph;
  if (part == Part::A) {
    c.beta -= 2.0 * ph * pb;
    c.gamma += ph * pb * pb;
  } else {
    c.gamma -= ph * pb * pb;
  }
  // -D s^2 [(t1 + 2 t2) p^2 + s pbar p + (3t - 2 t1 - t2) pbar^2] / 3 K m^2 hbar^2
  const Complex dd = d.D * s * s / (3.0 * K * m * m * hbar * hbar);
  c.alpha += dd * (t1 + 2.0 * t2);
  c.beta -= dd * s * pb;
  c.gamma -= dd * (3.0 * t - 2.0 * t1 - t2) * pb * pb;

  const double pref = prefactor_magnitude(cfg);
  c.gamma += std::log(pref);
  if (part == Part::A) c.gamma += I * kPi;
  return c;
}

Complex integrand_A(double t1, double t2, double p, const ScatteringConfig& cfg) {
  return integrand_coefficients(t1, t2, Part::A, cfg).value(p);
}

Complex integrand_B(double t1, double t2, double p, const ScatteringConfig& cfg) {
  return integrand_coefficients(t1, t2, Part::B, cfg).value(p);
}

std::vector<double> time_breakpoints(const ScatteringConfig& cfg) {
  const auto& d = cfg.dynamics;
  const double t_E = d.mass * d.hbar / (cfg.pbar * cfg.pbar);
  const double s_A = 2.0 * d.mass * cfg.a * cfg.a / d.hbar;
  const double s_min = 1e-3 * std::min({t_E, s_A, cfg.t});
  std::vector<double> out;
  for (double s = 0.5 * cfg.t; s > s_min; s *= 0.5) out.push_back(s);
  std::reverse(out.begin(), out.end());
  return out;
}

PdfValue second_order_pdf(double p, const ScatteringConfig& cfg, const QuadratureSpec& quad) {
  cfg.validate();
  require_diffusion(cfg, "second_order_pdf");
  const QuadratureSpec spec = with_floor(quad, integral_scale(cfg));
  const auto breaks = time_breakpoints(cfg);
  auto f = [&](double t1, double t2) {
    return integrand_A(t1, t2, p, cfg) + integrand_B(t1, t2, p, cfg);
  };
  const auto r = quad::integrate_triangle<Complex>(f, cfg.t, spec, breaks);
  return {2.0 * r.value.real(), 2.0 * r.error};
}

std::vector<PdfValue> second_order_grid(std::span<const double> ps, const ScatteringConfig& cfg,
                                        const QuadratureSpec& quad) {
  return grid_parallel(ps, [&](double p) { return second_order_pdf(p, cfg, quad); });
}

std::vector<PdfValue> second_order_grid_serial(std::span<const double> ps, const ScatteringConfig& cfg,
                                               const QuadratureSpec& quad) {
  std::vector<PdfValue> out;
  out.reserve(ps.size());
  for (double p : ps) out.push_back(second_order_pdf(p, cfg, quad));
  return out;
}

double reflected_pdf_free(double p, const ScatteringConfig& cfg) {
  cfg.validate();
  const auto& d = cfg.dynamics;
  const double hbar = d.hbar;
  const double dp = p - cfg.pbar;
  const double envelope = 2.0 * prefactor_magnitude(cfg) * std::exp(-cfg.a * cfg.a * dp * dp / (hbar * hbar));
  const double w = (p * p - cfg.pbar * cfg.pbar) / (2.0 * d.mass * hbar);
  const double wt = w * cfg.t;
  // (1 - cos wt) / w^2 = 2 sin^2(wt / 2) / w^2, which tends to t^2 / 2
  double shape;
  if (std::abs(wt) < 1e-4) {
    shape = 0.5 * cfg.t * cfg.t * (1.0 - wt * wt / 12.0);
  } else {
    const double sn = std::sin(0.5 * wt);
    shape = 2.0 * sn * sn / (w * w);
  }
  return envelope * shape;
}

double born_reflection(double p, const ScatteringConfig& cfg) {
  if (!(p > 0.0)) throw DomainError("born_reflection: Born approximation diverges at p <= 0");
  const auto& d = cfg.dynamics;
  const double hbar = d.hbar;
  const double r = cfg.V0 * d.mass / (hbar * p);
  return r * r * std::exp(-4.0 * cfg.a * cfg.a * p * p / (hbar * hbar));
}

double born_reflection(const ScatteringConfig& cfg) { return born_reflection(cfg.pbar, cfg); }

TimeScales time_scales(const ScatteringConfig& cfg) {
  cfg.validate();
  require_diffusion(cfg, "time_scales");
  const auto& d = cfg.dynamics;
  const double mh = d.mass * d.hbar;
  const double Dt = d.D * cfg.t;
  return {mh / (cfg.pbar * cfg.pbar), mh / Dt, mh / (cfg.pbar * std::sqrt(Dt))};
}

Reflection reflection_probability(const ScatteringConfig& cfg, const QuadratureSpec& quad) {
  cfg.validate();
  require_diffusion(cfg, "reflection_probability");
  const double spread = std::sqrt(cfg.dynamics.D * cfg.t);
  if (cfg.pbar < 3.0 * spread) {
    std::ostringstream os;
    os << "reflection_probability: peaks not separated, pbar / sqrt(D t) = " << cfg.pbar / spread << " < 3";
    throw DomainError(os.str());
  }
  const QuadratureSpec spec = with_floor(quad, born_reflection(cfg));
  const auto breaks = time_breakpoints(cfg);
  auto f = [&](double t1, double t2) {
    MomentSum total{};
    total.p_scale = cfg.pbar;
    for (Part part : {Part::A, Part::B}) {
      const auto c = integrand_coefficients(t1, t2, part, cfg);
      const auto m = special::negative_half_line_moments(c.alpha, c.beta, c.gamma);
      const Complex inv = 1.0 / std::sqrt(c.K);
      total.m0 += m.m0 * inv;
      total.m1 += m.m1 * inv;
      total.m2 += m.m2 * inv;
    }
    return total;
  };
  const auto r = quad::integrate_triangle<MomentSum>(f, cfg.t, spec, breaks);
  const double m0 = 2.0 * r.value.m0.real();
  const double m1 = 2.0 * r.value.m1.real();
  const double m2 = 2.0 * r.value.m2.real();
  if (!(m0 > 0.0)) {
    throw NumericalError("reflection_probability: non-positive reflected weight " + std::to_string(m0));
  }
  const double mean = m1 / m0;
  const double var = m2 / m0 - mean * mean;
  return {m0, std::sqrt(std::max(var, 0.0)), 2.0 * r.error};
}

SecondOrderTotals second_order_totals(const ScatteringConfig& cfg, const QuadratureSpec& quad) {
  cfg.validate();
  require_diffusion(cfg, "second_order_totals");
  const QuadratureSpec spec = with_floor(quad, born_reflection(cfg));
  const auto breaks = time_breakpoints(cfg);
  auto total = [&](Part part) {
    auto f = [&](double t1, double t2) {
      const auto c = integrand_coefficients(t1, t2, part, cfg);
      return special::full_line_moments(c.alpha, c.beta, c.gamma).m0 / std::sqrt(c.K);
    };
    return quad::integrate_triangle<Complex>(f, cfg.t, spec, breaks);
  };
  const auto a = total(Part::A);
  const auto b = total(Part::B);
  return {2.0 * a.value.real(), 2.0 * b.value.real(), 2.0 * (a.error + b.error)};
}

PdfValue integrate_second_order(double p_lo, double p_hi, const ScatteringConfig& cfg, const QuadratureSpec& p_quad,
                                const QuadratureSpec& t_quad) {
  cfg.validate();
  require_diffusion(cfg, "integrate_second_order");
  const double spread = std::sqrt(cfg.dynamics.D * cfg.t);
  std::vector<double> breaks;
  for (double centre : {-cfg.pbar, cfg.pbar}) {
    for (double k : {-4.0, -1.0, 0.0, 1.0, 4.0}) breaks.push_back(centre + k * spread);
  }
  std::sort(breaks.begin(), breaks.end());
  double inner_err = 0.0;
  auto f = [&](double p) {
    const auto v = second_order_pdf(p, cfg, t_quad);
    inner_err = std::max(inner_err, v.error);
    return v.value;
  };
  const auto r = quad::integrate<double>(f, p_lo, p_hi, p_quad, breaks);
  return {r.value, r.error + inner_err * (p_hi - p_lo)};
}

std::vector<std::string> perturbation_warnings(const ScatteringConfig& cfg, std::span<const PdfValue> second) {
  std::vector<std::string> out;
  const double Dt = cfg.dynamics.D * cfg.t;
  if (!(Dt > 0.0)) return out;
  const double peak = 1.0 / std::sqrt(4.0 * kPi * Dt);
  double worst = 0.0;
  for (const auto& v : second) worst = std::max(worst, std::abs(v.value));
  if (worst > 0.2 * peak) {
    std::ostringstream os;
    os << "perturbation theory doubtful: |second order| reaches " << worst << ", above 20% of the zeroth-order peak "
       << peak;
    out.push_back(os.str());
  }
  return out;
}

}  // namespace csl::scattering
