#include "csl/params.hpp"

#include <cmath>

#include "csl/errors.hpp"

namespace csl {

namespace {

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw DomainError(std::string(name) + " must be finite and > 0, got " + std::to_string(v));
  }
}

}  // namespace

UnitSystem::UnitSystem(double length_scale, double mass_scale, double time_scale)
    : length_(length_scale), mass_(mass_scale), time_(time_scale) {
  require_positive(length_scale, "length_scale");
  require_positive(mass_scale, "mass_scale");
  require_positive(time_scale, "time_scale");
}

UnitSystem UnitSystem::natural(double hbar, double mass, double length) {
  require_positive(hbar, "hbar");
  // hbar = M L^2 / T  =>  T = M L^2 / hbar
  return UnitSystem(length, mass, mass * length * length / hbar);
}

double UnitSystem::factor(Dimension d) const {
  return std::pow(mass_, d.mass) * std::pow(length_, d.length) * std::pow(time_, d.time);
}

void PhysParams::validate() const {
  require_positive(hbar, "hbar");
  require_positive(mass, "mass");
  require_positive(nucleon_mass, "nucleon_mass");
  require_positive(lambda0, "lambda0");
  require_positive(alpha, "alpha");
}

double PhysParams::lambda() const { return lambda_from_mass(mass, nucleon_mass, lambda0); }

double PhysParams::diffusion() const { return diffusion_coefficient(lambda(), alpha, hbar); }

void Dynamics::validate() const {
  require_positive(hbar, "hbar");
  require_positive(mass, "mass");
  if (!(std::isfinite(D) && D >= 0.0)) throw DomainError("D must be finite and >= 0");
}

double lambda_from_mass(double mass, double nucleon_mass, double lambda0) {
  require_positive(mass, "mass");
  require_positive(nucleon_mass, "nucleon_mass");
  require_positive(lambda0, "lambda0");
  const double ratio = mass / nucleon_mass;
  return ratio * ratio * lambda0;
}

double diffusion_coefficient(double lambda, double alpha, double hbar) {
  require_positive(lambda, "lambda");
  require_positive(alpha, "alpha");
  require_positive(hbar, "hbar");
  return lambda * alpha * hbar * hbar / 4.0;
}

PhysParams to_natural(const PhysParams& p, const UnitSystem& u) {
  p.validate();
  return {u.to_natural(p.hbar, dim::action), u.to_natural(p.mass, dim::mass),
          u.to_natural(p.nucleon_mass, dim::mass), u.to_natural(p.lambda0, dim::rate),
          u.to_natural(p.alpha, dim::inverse_area)};
}

PhysParams from_natural(const PhysParams& p, const UnitSystem& u) {
  p.validate();
  return {u.from_natural(p.hbar, dim::action), u.from_natural(p.mass, dim::mass),
          u.from_natural(p.nucleon_mass, dim::mass), u.from_natural(p.lambda0, dim::rate),
          u.from_natural(p.alpha, dim::inverse_area)};
}

Dynamics to_natural(const Dynamics& d, const UnitSystem& u) {
  return {u.to_natural(d.hbar, dim::action), u.to_natural(d.mass, dim::mass),
          u.to_natural(d.D, dim::diffusion)};
}

Dynamics from_natural(const Dynamics& d, const UnitSystem& u) {
  return {u.from_natural(d.hbar, dim::action), u.from_natural(d.mass, dim::mass),
          u.from_natural(d.D, dim::diffusion)};
}

PhysParams grw_preset(double mass_kg) {
  PhysParams p{constants::hbar_si, mass_kg, constants::nucleon_mass_si, constants::grw_lambda0,
               constants::grw_alpha};
  p.validate();
  return p;
}

PhysParams preset(const std::string& name, double mass_kg) {
  if (name == "grw") return grw_preset(mass_kg);
  throw DomainError("unknown parameter preset '" + name + "' (available: grw)");
}

}  // namespace csl
