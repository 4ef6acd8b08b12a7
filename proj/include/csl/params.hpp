#pragma once

#include <string>

namespace csl {

namespace constants {
inline constexpr double hbar_si = 1.054571817e-34;          // J s
inline constexpr double nucleon_mass_si = 1.67262192369e-27; // kg (proton)
inline constexpr double amu_si = 1.66053906660e-27;          // kg
// GRW estimates.
inline constexpr double grw_lambda0 = 1e-16;  // 1/s
inline constexpr double grw_alpha = 1e14;     // 1/m^2, i.e. 1/sqrt(alpha) = 1e-7 m
}  // namespace constants

/// Physical dimension as exponents of (mass, length, time).
struct Dimension {
  int mass = 0;
  int length = 0;
  int time = 0;
};

namespace dim {
inline constexpr Dimension none{0, 0, 0};
inline constexpr Dimension mass{1, 0, 0};
inline constexpr Dimension length{0, 1, 0};
inline constexpr Dimension time{0, 0, 1};
inline constexpr Dimension rate{0, 0, -1};
inline constexpr Dimension inverse_area{0, -2, 0};
inline constexpr Dimension inverse_length{0, -1, 0};
inline constexpr Dimension action{1, 2, -1};
inline constexpr Dimension momentum{1, 1, -1};
inline constexpr Dimension inverse_momentum{-1, -1, 1};
inline constexpr Dimension diffusion{2, 2, -3};           // momentum^2 / time
inline constexpr Dimension potential_strength{1, 3, -2};  // energy * length
}  // namespace dim

/// Scales defining a unit system relative to SI. A value v expressed in SI
/// becomes v / (M^a L^b T^c) in this system.
class UnitSystem {
 public:
  UnitSystem() = default;
  UnitSystem(double length_scale, double mass_scale, double time_scale);

  static UnitSystem identity() { return {}; }
  /// Units in which hbar = mass = length = 1.
  static UnitSystem natural(double hbar, double mass, double length);

  double length_scale() const { return length_; }
  double mass_scale() const { return mass_; }
  double time_scale() const { return time_; }

  double to_natural(double value, Dimension d) const { return value / factor(d); }
  double from_natural(double value, Dimension d) const { return value * factor(d); }

 private:
  double factor(Dimension d) const;

  double length_ = 1.0;
  double mass_ = 1.0;
  double time_ = 1.0;
};

/// CSL parameters for a single particle species. All fields strictly positive.
struct PhysParams {
  double hbar = 1.0;
  double mass = 1.0;
  double nucleon_mass = 1.0;
  double lambda0 = 1.0;
  double alpha = 1.0;

  /// Throws DomainError unless every field is finite and > 0.
  void validate() const;

  double lambda() const;
  double diffusion() const;
};

/// The three numbers the master equation actually depends on in the
/// quadratic (large localization length) limit. D may be zero.
struct Dynamics {
  double hbar = 1.0;
  double mass = 1.0;
  double D = 0.0;

  static Dynamics natural(double D) { return {1.0, 1.0, D}; }
  static Dynamics from(const PhysParams& p) { return {p.hbar, p.mass, p.diffusion()}; }

  void validate() const;
};

double lambda_from_mass(double mass, double nucleon_mass, double lambda0);
double diffusion_coefficient(double lambda, double alpha, double hbar);

PhysParams to_natural(const PhysParams& params, const UnitSystem& units);
PhysParams from_natural(const PhysParams& params, const UnitSystem& units);
Dynamics to_natural(const Dynamics& d, const UnitSystem& units);
Dynamics from_natural(const Dynamics& d, const UnitSystem& units);

/// Named preset "grw": lambda0 = 1e-16 1/s, 1/sqrt(alpha) = 1e-7 m, SI units.
PhysParams grw_preset(double mass_kg);
PhysParams preset(const std::string& name, double mass_kg);

}  // namespace csl
