#include "csl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csl/errors.hpp"
#include "csl/oracle.hpp"
#include "csl/propagator.hpp"
#include "csl/scattering.hpp"
#include "csl/twoparticle.hpp"
#include "csl/twoslit.hpp"

namespace csl::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Param {
  std::string name;
  std::string value;
  std::string unit;
};

struct Scalar {
  std::string name;
  double value;
  std::string unit;
};

struct Column {
  std::string name;
  std::string unit;
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string units;
  std::vector<Param> parameters;
  std::vector<std::string> warnings;
  std::vector<std::string> cost;
  std::vector<Scalar> summary;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;

  void param(const std::string& name, double v, const std::string& unit) { parameters.push_back({name, fmt(v), unit}); }
  void param(const std::string& name, const std::string& v) { parameters.push_back({name, v, ""}); }
  void warn(const std::vector<std::string>& ws) {
    for (const auto& w : ws) {
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
  }
};

// Unit labels: SI symbols in physical mode, "natural" otherwise.
struct Units {
  bool physical = false;
  UnitSystem system;

  std::string label(Dimension d) const {
    if (!physical) return d.mass == 0 && d.length == 0 && d.time == 0 ? "1" : "natural";
    std::string out;
    auto part = [&](const char* sym, int e) {
      if (e == 0) return;
      if (!out.empty()) out += ' ';
      out += sym;
      if (e != 1) out += "^" + std::to_string(e);
    };
    part("kg", d.mass);
    part("m", d.length);
    part("s", d.time);
    return out.empty() ? "1" : out;
  }
  double in(double v, Dimension d) const { return physical ? system.to_natural(v, d) : v; }
  double out(double v, Dimension d) const { return physical ? system.from_natural(v, d) : v; }
};

std::vector<double> linspace(double a, double b, long n) {
  if (n < 2) throw ConfigError("n_points must be >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

void reject_in_physical_mode(const KeyValueConfig& c, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (c.has(k)) {
      throw ConfigError(std::string("key '") + k + "' cannot be combined with physical CSL parameters, it is derived from them");
    }
  }
}

void record_physical(Report& r, const PhysParams& p) {
  r.param("hbar", p.hbar, "kg m^2 s^-1");
  r.param("mass", p.mass, "kg");
  r.param("nucleon_mass", p.nucleon_mass, "kg");
  r.param("lambda0", p.lambda0, "s^-1");
  r.param("alpha", p.alpha, "m^-2");
  r.param("lambda", p.lambda(), "s^-1");
  r.param("D", p.diffusion(), "kg^2 m^2 s^-3");
}

// ---------------------------------------------------------------- twoslit

Report run_twoslit(const KeyValueConfig& c, bool dry) {
  c.require_known(valid_keys("twoslit"), "twoslit");
  Report r;
  r.scenario = "twoslit";
  Units u;
  u.physical = has_physical_params(c);

  twoslit::TwoSlitConfig base;
  std::vector<double> Ds;
  if (u.physical) {
    reject_in_physical_mode(c, {"D", "hbar", "mass", "localization_length"});
    const PhysParams p = physparams_from_config(c);
    const double sigma = c.get_double("sigma");
    u.system = UnitSystem::natural(p.hbar, p.mass, sigma);
    r.units = "SI (computed in units hbar = mass = sigma = 1)";
    record_physical(r, p);
    base.dynamics = to_natural(Dynamics::from(p), u.system);
    base.localization_length = u.in(1.0 / std::sqrt(p.alpha), dim::length);
    Ds = {base.dynamics.D};
  } else {
    r.units = "natural";
    base.dynamics = {c.get_double("hbar", 1.0), c.get_double("mass", 1.0), 0.0};
    r.param("hbar", base.dynamics.hbar, u.label(dim::action));
    r.param("mass", base.dynamics.mass, u.label(dim::mass));
    Ds = c.has("D") ? c.get_list("D") : std::vector<double>{0.0};
    base.localization_length = c.get_double("localization_length", base.localization_length);
    for (std::size_t i = 0; i < Ds.size(); ++i) r.param("D[" + std::to_string(i) + "]", Ds[i], u.label(dim::diffusion));
    if (std::isfinite(base.localization_length)) {
      r.param("localization_length", base.localization_length, u.label(dim::length));
    }
  }
  base.sigma = u.in(c.get_double("sigma", 1.0), dim::length);
  base.mu = u.in(c.get_double("mu", 5.0), dim::length);
  base.t = u.in(c.get_double("t", 10.0), dim::time);
  base.renormalize = c.get_bool("renormalize", false);
  r.param("sigma", u.out(base.sigma, dim::length), u.label(dim::length));
  r.param("mu", u.out(base.mu, dim::length), u.label(dim::length));
  r.param("t", u.out(base.t, dim::time), u.label(dim::time));
  r.param("renormalize", base.renormalize ? "true" : "false");

  std::vector<twoslit::TwoSlitConfig> cfgs;
  double reach = 0.0;
  for (double D : Ds) {
    auto cfg = base;
    cfg.dynamics.D = D;
    cfg.validate();
    r.warn(cfg.warnings());
    reach = std::max(reach, cfg.mu + 4.0 * cfg.sigma * std::sqrt(twoslit::spread_factor(cfg)));
    cfgs.push_back(cfg);
  }
  const double x_min = u.in(c.get_double("x_min", u.out(-reach, dim::length)), dim::length);
  const double x_max = u.in(c.get_double("x_max", u.out(reach, dim::length)), dim::length);
  const long n = c.get_int("n_points", 601);
  const int vis_samples = static_cast<int>(c.get_int("visibility_samples", 4001));
  r.param("x_min", u.out(x_min, dim::length), u.label(dim::length));
  r.param("x_max", u.out(x_max, dim::length), u.label(dim::length));
  r.param("n_points", static_cast<double>(n), "1");
  if (!(x_max > x_min)) throw ConfigError("x_max must exceed x_min");

  r.summary.push_back({"overlap_time", u.out(twoslit::overlap_time(base), dim::time), u.label(dim::time)});
  const double dcrit = twoslit::critical_D(base);
  r.summary.push_back({"critical_D", u.out(dcrit, dim::diffusion), u.label(dim::diffusion)});
  const Dimension per_area_time{0, -2, -1};
  r.summary.push_back({"critical_D_over_hbar2",
                       u.out(dcrit / (base.dynamics.hbar * base.dynamics.hbar), per_area_time), u.label(per_area_time)});
  r.summary.push_back({"initial_trace", twoslit::initial_trace(base), "1"});

  r.columns.push_back({"x", u.label(dim::length)});
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    const std::string tag = cfgs.size() == 1 ? "" : "[" + std::to_string(i) + "]";
    r.columns.push_back({"pdf" + tag, u.label(dim::inverse_length)});
    const auto& cfg = cfgs[i];
    r.summary.push_back({"spread_factor" + tag, twoslit::spread_factor(cfg), "1"});
    r.summary.push_back({"damping_exponent" + tag, twoslit::damping_exponent(cfg), "1"});
    r.summary.push_back({"fringe_wavenumber" + tag, u.out(twoslit::fringe_wavenumber(cfg), dim::inverse_length),
                         u.label(dim::inverse_length)});
    if (!dry) r.summary.push_back({"visibility" + tag, twoslit::fringe_visibility(cfg, vis_samples), "1"});
  }
  r.cost.push_back("closed-form screen samples: " + std::to_string(n * static_cast<long>(cfgs.size())));
  if (dry) return r;

  const auto xs = linspace(x_min, x_max, n);
  std::vector<std::vector<double>> pdfs;
  for (const auto& cfg : cfgs) pdfs.push_back(twoslit::screen_pdf_grid(cfg, xs));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> row{u.out(xs[i], dim::length)};
    for (const auto& p : pdfs) row.push_back(u.out(p[i], dim::inverse_length));
    r.rows.push_back(std::move(row));
  }
  return r;
}

// ---------------------------------------------------------------- scatter

Report run_scatter(const KeyValueConfig& c, bool dry) {
  c.require_known(valid_keys("scatter"), "scatter");
  Report r;
  r.scenario = "scatter";
  r.units = "natural";
  const Units u;
  scattering::ScatteringConfig cfg;
  cfg.dynamics = {c.get_double("hbar", 1.0), c.get_double("mass", 1.0), c.get_double("D", 1e-4)};
  cfg.pbar = c.get_double("pbar", 1.0);
  cfg.V0 = c.get_double("V0", 0.01);
  cfg.a = c.get_double("a", 0.1);
  if (c.has("sigma")) cfg.sigma = c.get_double("sigma");
  if (c.has("t")) {
    cfg.t = c.get_double("t");
  } else if (c.has("sigma")) {
    cfg.t = scattering::crossing_time(cfg.sigma, cfg.pbar, cfg.dynamics.mass);
  }
  cfg.drop_width_term = c.get_bool("drop_width_term", false);
  cfg.validate();
  if (cfg.V0 == 0.0) throw DomainError("V0 must be non-zero, the second order is reported per V0^2");

  quad::QuadratureSpec q;
  q.rel_tol = c.get_double("rel_tol", q.rel_tol);
  q.abs_tol = c.get_double("abs_tol", q.abs_tol);
  q.max_subdivisions = static_cast<int>(c.get_int("max_subdivisions", q.max_subdivisions));
  q.validate();

  const double p_min = c.get_double("p_min", -1.5 * cfg.pbar);
  const double p_max = c.get_double("p_max", 1.5 * cfg.pbar);
  const long n = c.get_int("n_points", 301);
  if (!(p_max > p_min)) throw ConfigError("p_max must exceed p_min");

  r.param("hbar", cfg.dynamics.hbar, u.label(dim::action));
  r.param("mass", cfg.dynamics.mass, u.label(dim::mass));
  r.param("D", cfg.dynamics.D, u.label(dim::diffusion));
  r.param("pbar", cfg.pbar, u.label(dim::momentum));
  r.param("V0", cfg.V0, u.label(dim::potential_strength));
  r.param("a", cfg.a, u.label(dim::length));
  r.param("t", cfg.t, u.label(dim::time));
  if (!std::isnan(cfg.sigma)) r.param("sigma", cfg.sigma, u.label(dim::length));
  r.param("drop_width_term", cfg.drop_width_term ? "true" : "false");
  r.param("p_min", p_min, u.label(dim::momentum));
  r.param("p_max", p_max, u.label(dim::momentum));
  r.param("n_points", static_cast<double>(n), "1");
  r.param("rel_tol", q.rel_tol, "1");
  r.param("abs_tol", q.abs_tol, "1");
  r.param("max_subdivisions", static_cast<double>(q.max_subdivisions), "1");
  r.warn(cfg.warnings());

  const double v2 = cfg.V0 * cfg.V0;
  r.summary.push_back({"born_reflection", scattering::born_reflection(cfg), "1"});
  if (cfg.dynamics.D > 0.0) {
    const auto ts = scattering::time_scales(cfg);
    r.summary.push_back({"t_E", ts.t_E, u.label(dim::time)});
    r.summary.push_back({"t_1", ts.t_1, u.label(dim::time)});
    r.summary.push_back({"t_2", ts.t_2, u.label(dim::time)});
    r.summary.push_back({"sqrt_Dt", std::sqrt(cfg.dynamics.D * cfg.t), u.label(dim::momentum)});
  }
  const auto breaks = scattering::time_breakpoints(cfg);
  const double panels = static_cast<double>(q.max_subdivisions) + static_cast<double>(breaks.size()) + 1.0;
  r.cost.push_back("integrand evaluation bound per momentum sample: " + fmt(21.0 * panels * 21.0 * panels));
  r.cost.push_back("momentum samples: " + std::to_string(n));
  if (dry) return r;

  if (cfg.dynamics.D > 0.0) {
    const auto refl = scattering::reflection_probability(cfg, q);
    r.summary.push_back({"reflection_probability", refl.probability, "1"});
    r.summary.push_back({"reflection_probability_error", refl.error, "1"});
    r.summary.push_back({"reflected_width", refl.width, u.label(dim::momentum)});
    const auto tot = scattering::second_order_totals(cfg, q);
    r.summary.push_back({"total_A_over_V0sq", tot.A / v2, u.label(Dimension{-2, -6, 4})});
    r.summary.push_back({"total_B_over_V0sq", tot.B / v2, u.label(Dimension{-2, -6, 4})});
  }

  r.columns = {{"p", u.label(dim::momentum)},
               {"zeroth", u.label(dim::inverse_momentum)},
               {"second_over_V0sq", u.label(dim::inverse_momentum)},
               {"second_error_over_V0sq", u.label(dim::inverse_momentum)}};
  const auto ps = linspace(p_min, p_max, n);
  std::vector<scattering::PdfValue> second;
  if (cfg.dynamics.D > 0.0) {
    second = scattering::second_order_grid(ps, cfg, q);
  } else {
    // Only the reflected part has a pointwise D = 0 limit.
    for (double p : ps) second.push_back({scattering::reflected_pdf_free(p, cfg), 0.0});
    r.warn({"D = 0: second-order column holds the reflected part only, the transmitted part is a point mass"});
  }
  r.warn(scattering::perturbation_warnings(cfg, second));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto z = scattering::zeroth_order_pdf(ps[i], cfg);
    const double zeroth = std::holds_alternative<double>(z) ? std::get<double>(z) : std::nan("");
    r.rows.push_back({ps[i], zeroth, second[i].value / v2, second[i].error / v2});
  }
  return r;
}

// ------------------------------------------------------------ twoparticle

Report run_twoparticle(const KeyValueConfig& c, bool dry) {
  c.require_known(valid_keys("twoparticle"), "twoparticle");
  Report r;
  r.scenario = "twoparticle";
  Units u;
  u.physical = has_physical_params(c);
  twoparticle::TwoParticleConfig cfg;
  if (u.physical) {
    reject_in_physical_mode(c, {"D", "hbar", "mass", "localization_length"});
    const PhysParams p = physparams_from_config(c);
    const double sigma = c.get_double("sigma");
    u.system = UnitSystem::natural(p.hbar, p.mass, sigma);
    r.units = "SI (computed in units hbar = mass = sigma = 1)";
    record_physical(r, p);
    cfg.dynamics = to_natural(Dynamics::from(p), u.system);
    cfg.localization_length = u.in(1.0 / std::sqrt(p.alpha), dim::length);
  } else {
    r.units = "natural";
    cfg.dynamics = {c.get_double("hbar", 1.0), c.get_double("mass", 1.0), c.get_double("D", 0.1)};
    cfg.localization_length = c.get_double("localization_length", cfg.localization_length);
    r.param("hbar", cfg.dynamics.hbar, u.label(dim::action));
    r.param("mass", cfg.dynamics.mass, u.label(dim::mass));
    r.param("D", cfg.dynamics.D, u.label(dim::diffusion));
  }
  cfg.sigma = u.in(c.get_double("sigma", 1.0), dim::length);
  r.param("sigma", u.out(cfg.sigma, dim::length), u.label(dim::length));

  const bool sweep = c.has("t_min") || c.has("t_max") || c.has("n_times");
  if (sweep) {
    if (c.has("t")) throw ConfigError("give either t or the sweep keys t_min, t_max, n_times");
    const double t_min = u.in(c.get_double("t_min"), dim::time);
    const double t_max = u.in(c.get_double("t_max"), dim::time);
    const long n = c.get_int("n_times", 61);
    if (!(t_min > 0.0) || !(t_max > t_min)) throw ConfigError("need 0 < t_min < t_max");
    if (n < 2) throw ConfigError("n_times must be >= 2");
    r.param("t_min", u.out(t_min, dim::time), u.label(dim::time));
    r.param("t_max", u.out(t_max, dim::time), u.label(dim::time));
    r.param("n_times", static_cast<double>(n), "1");
    cfg.t = t_max;
    cfg.validate();
    r.warn(cfg.warnings());
    const auto s = twoparticle::spread_statistics(cfg);
    r.summary.push_back({"sigma_X_at_t_max", u.out(s.sigma_X, dim::length), u.label(dim::length)});
    r.summary.push_back({"sigma_xi_half_at_t_max", u.out(s.sigma_xi_half, dim::length), u.label(dim::length)});
    r.summary.push_back({"ratio_at_t_max", s.ratio, "1"});
    if (t_max / t_min >= 1e3) {
      const auto e = twoparticle::asymptotic_exponents(cfg, t_min, t_max);
      r.summary.push_back({"slope_X", e.slope_X, "1"});
      r.summary.push_back({"slope_xi_half", e.slope_xi_half, "1"});
    }
    r.cost.push_back("closed-form time samples: " + std::to_string(n));
    if (dry) return r;
    r.columns = {{"t", u.label(dim::time)},
                 {"sigma_X", u.label(dim::length)},
                 {"sigma_xi_half", u.label(dim::length)},
                 {"ratio", "1"}};
    // Logarithmic spacing, as the spreads are power laws in t.
    for (long i = 0; i < n; ++i) {
      auto at = cfg;
      at.t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / static_cast<double>(n - 1));
      const auto st = twoparticle::spread_statistics(at);
      r.rows.push_back(
          {u.out(at.t, dim::time), u.out(st.sigma_X, dim::length), u.out(st.sigma_xi_half, dim::length), st.ratio});
    }
    return r;
  }

  cfg.t = u.in(c.get_double("t", 1.0), dim::time);
  cfg.validate();
  r.param("t", u.out(cfg.t, dim::time), u.label(dim::time));
  r.warn(cfg.warnings());
  const auto s = twoparticle::spread_statistics(cfg);
  r.summary.push_back({"sigma_X", u.out(s.sigma_X, dim::length), u.label(dim::length)});
  r.summary.push_back({"sigma_xi_half", u.out(s.sigma_xi_half, dim::length), u.label(dim::length)});
  r.summary.push_back({"ratio", s.ratio, "1"});
  r.summary.push_back({"ratio_minus_one", s.ratio - 1.0, "1"});
  r.summary.push_back({"L", twoparticle::spread_L(cfg), "1"});

  const double X_max = u.in(c.get_double("X_max", u.out(4.0 * s.sigma_X, dim::length)), dim::length);
  const double xi_max = u.in(c.get_double("xi_max", u.out(8.0 * s.sigma_xi_half, dim::length)), dim::length);
  const long n = c.get_int("n_grid", 41);
  r.param("X_max", u.out(X_max, dim::length), u.label(dim::length));
  r.param("xi_max", u.out(xi_max, dim::length), u.label(dim::length));
  r.param("n_grid", static_cast<double>(n), "1");
  r.cost.push_back("closed-form grid samples: " + std::to_string(n * n));
  if (dry) return r;

  r.columns = {{"X", u.label(dim::length)}, {"xi", u.label(dim::length)}, {"pdf", u.label(dim::inverse_area)}};
  const auto Xs = linspace(-X_max, X_max, n);
  const auto xis = linspace(-xi_max, xi_max, n);
  const auto vals = twoparticle::joint_pdf_grid(Xs, xis, cfg);
  for (std::size_t i = 0; i < Xs.size(); ++i) {
    for (std::size_t j = 0; j < xis.size(); ++j) {
      r.rows.push_back({u.out(Xs[i], dim::length), u.out(xis[j], dim::length),
                        u.out(vals[i * xis.size() + j], dim::inverse_area)});
    }
  }
  return r;
}

// ----------------------------------------------------------- oracle-check

Report run_oracle(const KeyValueConfig& c, std::uint64_t seed, bool dry) {
  c.require_known(valid_keys("oracle-check"), "oracle-check");
  Report r;
  r.scenario = "oracle-check";
  r.units = "natural (hbar = mass = 1)";
  r.seed = seed;
  const Units u;
  const long n = c.get_int("n_grid", 512);
  const double dx = c.get_double("dx", 1.0 / 16.0);
  const double dt = c.get_double("dt", 0.01);
  const double t_final = c.get_double("t_final", 1.0);
  const double sigma = c.get_double("sigma", 1.0);
  const long n_traj = c.get_int("n_traj", 0);
  const double sde_dt = c.get_double("sde_dt", 1e-3);
  const std::string form = c.get_string("form", "quadratic");
  if (n > 1 << 14) throw ConfigError("n_grid too large");

  oracle::MasterSettings ms;
  ms.dynamics = Dynamics::natural(c.get_double("D", 0.01));
  if (form == "quadratic") {
    ms.form = oracle::DecoherenceForm::Quadratic;
  } else if (form == "exponential") {
    ms.form = oracle::DecoherenceForm::Exponential;
    ms.alpha = c.get_double("alpha");
  } else {
    throw ConfigError("form must be 'quadratic' or 'exponential', got '" + form + "'");
  }
  if (c.has("alpha") && ms.form == oracle::DecoherenceForm::Quadratic) {
    throw ConfigError("alpha only applies to form = exponential");
  }
  const oracle::Grid grid{static_cast<int>(n), -0.5 * static_cast<double>(n) * dx, dx};
  grid.validate();
  ms.validate(grid);
  if (!(t_final >= 0.0) || !(dt > 0.0) || !(sde_dt > 0.0)) throw DomainError("need t_final >= 0, dt > 0, sde_dt > 0");
  if (n_traj < 0) throw ConfigError("n_traj must be >= 0");

  r.param("n_grid", static_cast<double>(n), "1");
  r.param("dx", dx, u.label(dim::length));
  r.param("dt", dt, u.label(dim::time));
  r.param("t_final", t_final, u.label(dim::time));
  r.param("D", ms.dynamics.D, u.label(dim::diffusion));
  r.param("form", form);
  if (ms.form == oracle::DecoherenceForm::Exponential) r.param("alpha", ms.alpha, u.label(dim::inverse_area));
  r.param("sigma", sigma, u.label(dim::length));
  r.param("n_traj", static_cast<double>(n_traj), "1");
  if (n_traj > 0) r.param("sde_dt", sde_dt, u.label(dim::time));
  if (sigma / dx < 16.0) {
    r.warn({"fewer than 16 grid points per sigma (" + fmt(sigma / dx) + ")"});
  }
  const double steps = std::ceil(t_final / dt);
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  r.cost.push_back("grid memory: " + fmt(3.0 * 16.0 * nn) + " bytes");
  r.cost.push_back("master steps: " + fmt(steps));
  if (n_traj > 0) r.cost.push_back("trajectory steps: " + fmt(static_cast<double>(n_traj) * std::ceil(t_final / sde_dt)));
  if (dry) return r;

  const auto rho0 = propagator::gaussian_packet(sigma, 0.0, 0.0, 1.0);
  const auto grid_rho = oracle::evolve_master(oracle::sample(rho0, grid), t_final, dt, ms);
  const auto exact = oracle::sample(propagator::evolve(rho0, t_final, ms.dynamics), grid, t_final);
  const auto cmp = oracle::compare(grid_rho, exact);
  r.summary.push_back({"l2_error", cmp.l2_error, "1"});
  r.summary.push_back({"sup_error", cmp.sup_error, "1"});
  r.summary.push_back({"trace_gap", cmp.trace_gap, "1"});

  r.columns = {{"x", u.label(dim::length)}, {"grid_pdf", u.label(dim::inverse_length)},
               {"analytic_pdf", u.label(dim::inverse_length)}};
  std::vector<double> sde_diag;
  if (n_traj > 0) {
    oracle::SdeSettings ss;
    ss.dynamics = ms.dynamics;
    const auto ens = oracle::ensemble_average(grid, oracle::gaussian_wavefunction(grid, sigma), t_final, sde_dt, ss,
                                              static_cast<int>(n_traj), seed);
    r.summary.push_back({"sde_trace_distance", oracle::trace_distance(ens, grid_rho), "1"});
    r.summary.push_back({"sde_statistical_scale", 1.0 / std::sqrt(static_cast<double>(n_traj)), "1"});
    sde_diag = ens.diagonal();
    r.columns.push_back({"sde_pdf", u.label(dim::inverse_length)});
  }
  const auto gd = grid_rho.diagonal();
  const auto ed = exact.diagonal();
  for (int i = 0; i < grid.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    std::vector<double> row{grid.x(i), gd[k], ed[k]};
    if (!sde_diag.empty()) row.push_back(sde_diag[k]);
    r.rows.push_back(std::move(row));
  }
  return r;
}

// ----------------------------------------------------------------- output

void write_csv(const Report& r, bool dry, std::ostream& os) {
  os << "# tool: " << kToolName << ' ' << kVersion << '\n';
  os << "# scenario: " << r.scenario << '\n';
  os << "# mode: " << (dry ? "validate" : "run") << '\n';
  os << "# seed: " << r.seed << '\n';
  os << "# units: " << r.units << '\n';
  for (const auto& p : r.parameters) {
    os << "# param " << p.name << " = " << p.value;
    if (!p.unit.empty()) os << " [" << p.unit << ']';
    os << '\n';
  }
  for (const auto& w : r.warnings) os << "# warning: " << w << '\n';
  for (const auto& c : r.cost) os << "# cost: " << c << '\n';
  for (const auto& s : r.summary) os << "# summary " << s.name << " = " << fmt(s.value) << " [" << s.unit << "]\n";
  if (dry || r.columns.empty()) return;
  os << "# columns:";
  for (const auto& c : r.columns) os << ' ' << c.name << " [" << c.unit << ']';
  os << '\n';
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i].name;
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
    os << '\n';
  }
}

nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void write_json(const Report& r, bool dry, std::ostream& os) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["scenario"] = r.scenario;
  j["mode"] = dry ? "validate" : "run";
  j["seed"] = r.seed;
  j["units"] = r.units;
  auto& params = j["parameters"] = nlohmann::ordered_json::object();
  for (const auto& p : r.parameters) params[p.name] = {{"value", p.value}, {"unit", p.unit}};
  j["warnings"] = r.warnings;
  j["cost"] = r.cost;
  auto& summary = j["summary"] = nlohmann::ordered_json::object();
  for (const auto& s : r.summary) summary[s.name] = {{"value", number(s.value)}, {"unit", s.unit}};
  auto& cols = j["columns"] = nlohmann::ordered_json::array();
  if (!dry) {
    for (const auto& c : r.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  }
  auto& data = j["data"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    auto jr = nlohmann::ordered_json::array();
    for (double v : row) jr.push_back(number(v));
    data.push_back(std::move(jr));
  }
  os << j.dump(2) << '\n';
}

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config:
      return "config";
    case ErrorCategory::Domain:
      return "domain";
    case ErrorCategory::Numerical:
      return "numerical";
  }
  return "internal";
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config:
      return kExitConfig;
    case ErrorCategory::Domain:
      return kExitDomain;
    case ErrorCategory::Numerical:
      return kExitNumerical;
  }
  return kExitOther;
}

std::uint64_t resolve_seed(const KeyValueConfig& c, const ScenarioRequest& req) {
  if (req.seed) return *req.seed;
  const long s = c.get_int("seed", 0);
  if (s < 0) throw ConfigError("seed must be >= 0");
  return static_cast<std::uint64_t>(s);
}

}  // namespace

std::vector<std::string> scenarios() { return {"twoslit", "scatter", "twoparticle", "oracle-check"}; }

std::vector<std::string> valid_keys(const std::string& scenario) {
  std::vector<std::string> keys;
  if (scenario == "twoslit") {
    keys = {"sigma", "mu", "t", "D", "hbar", "mass", "localization_length", "x_min", "x_max", "n_points",
            "renormalize", "visibility_samples"};
  } else if (scenario == "scatter") {
    return {"pbar", "V0", "a", "t", "sigma", "D", "hbar", "mass", "p_min", "p_max", "n_points", "rel_tol", "abs_tol",
            "max_subdivisions", "drop_width_term"};
  } else if (scenario == "twoparticle") {
    keys = {"sigma", "t", "t_min", "t_max", "n_times", "D", "hbar", "mass", "localization_length", "X_max", "xi_max",
            "n_grid"};
  } else if (scenario == "oracle-check") {
    return {"n_grid", "dx", "dt", "t_final", "D", "form", "alpha", "sigma", "n_traj", "sde_dt", "seed"};
  } else {
    std::string list;
    for (const auto& s : scenarios()) list += (list.empty() ? "" : ", ") + s;
    throw ConfigError("unknown scenario '" + scenario + "'; valid scenarios: " + list);
  }
  keys.insert(keys.end(), physical_keys().begin(), physical_keys().end());
  return keys;
}

int run(const std::string& scenario, const KeyValueConfig& config, const ScenarioRequest& request, std::ostream& out,
        std::ostream& err) {
  try {
    valid_keys(scenario);
    const std::uint64_t seed = resolve_seed(config, request);
    Report report;
    if (scenario == "twoslit") {
      report = run_twoslit(config, request.dry_run);
    } else if (scenario == "scatter") {
      report = run_scatter(config, request.dry_run);
    } else if (scenario == "twoparticle") {
      report = run_twoparticle(config, request.dry_run);
    } else {
      report = run_oracle(config, seed, request.dry_run);
    }
    report.seed = seed;

    std::ofstream file;
    std::ostream* os = &out;
    if (!request.output_path.empty()) {
      file.open(request.output_path, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file '" + request.output_path + "'");
      os = &file;
    }
    if (request.format == Format::Csv) {
      write_csv(report, request.dry_run, *os);
    } else {
      write_json(report, request.dry_run, *os);
    }
    os->flush();
    if (!*os) throw ConfigError("failed writing output");
    return kExitOk;
  } catch (const Error& e) {
    err << "error category=" << category_name(e.category()) << ": " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error category=internal: " << e.what() << '\n';
    return kExitOther;
  }
}

int run(const ScenarioRequest& request, std::ostream& out, std::ostream& err) {
  try {
    KeyValueConfig config;
    if (!request.config_path.empty()) config = KeyValueConfig::load(request.config_path);
    for (const auto& o : request.overrides) config.apply_override(o);
    return run(request.scenario, config, request, out, err);
  } catch (const Error& e) {
    err << "error category=" << category_name(e.category()) << ": " << e.what() << '\n';
    return exit_code(e.category());
  }
}

}  // namespace csl::cli
