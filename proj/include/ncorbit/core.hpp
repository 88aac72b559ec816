#pragma once

#include <filesystem>
#include <numbers>

#include "ncorbit/vec3.hpp"

namespace ncorbit {

class KeyValueFile;

// SI constants. Defaults are CODATA 2018 (G, hbar, l_P, m_e), IAU-era solar
// mass as used in the bounds pipeline, and the proton mass for "nucleon".
struct PhysicalConstants {
  double G = 6.67430e-11;
  double hbar = 1.054571817e-34;
  double planck_length = 1.616255e-35;
  double solar_mass = 1.98892e30;
  double electron_mass = 9.1093837e-31;
  double nucleon_mass = 1.67262e-27;

  void validate() const;

  // Keys: G, hbar, planck_length, solar_mass, electron_mass, nucleon_mass.
  // Missing keys keep `base` values; unknown keys are rejected.
  static PhysicalConstants from_kv(const KeyValueFile& kv, const PhysicalConstants& base);
  static PhysicalConstants from_kv(const KeyValueFile& kv);
  static PhysicalConstants load(const std::filesystem::path& path);
};

// Rotationally averaged noncommutativity strengths attached to `mass`.
// theta_sq in s^2/kg^2, eta_sq in kg^2/s^2 (classical, hbar divided out).
struct NCParams {
  double theta_sq = 0.0;
  double eta_sq = 0.0;
  double mass = 1.0;

  // Mass-independent combinations A = <theta^2> m^2 and B = <eta^2> / m^2.
  double A() const { return theta_sq * mass * mass; }
  double B() const { return eta_sq / (mass * mass); }

  bool is_zero() const { return theta_sq == 0.0 && eta_sq == 0.0; }
  void validate() const;

  static NCParams from_scaling(double A, double B, double mass);
};

struct OrbitElements {
  double a = 1.0;  // semi-major axis, m
  double e = 0.0;  // eccentricity
  double k = 1.0;  // G * M_central, m^3/s^2
  double m = 1.0;  // orbiting mass, kg

  void validate() const;

  // Unperturbed Kepler period 2 pi sqrt(a^3 / k).
  double period() const;
};

struct PhaseState {
  Vec3 x;
  Vec3 p;
  double t = 0.0;
};

// Conversion factors from the scaled system (a = k = m = 1) to the caller's
// units. Multiply a scaled quantity by the matching factor to get SI.
struct UnitScales {
  double length = 1.0;
  double time = 1.0;
  double mass = 1.0;

  double momentum() const { return mass * length / time; }
  double energy() const { return mass * length * length / (time * time); }
  double angular_momentum() const { return mass * length * length / time; }
  double theta_sq() const { return time * time / (mass * mass); }
  double eta_sq() const { return mass * mass / (time * time); }

  PhaseState to_scaled(const PhaseState& s) const;
  PhaseState from_scaled(const PhaseState& s) const;
};

struct ScaledSystem {
  OrbitElements elements;
  NCParams nc;
  UnitScales scales;
};

// Length unit a, time unit sqrt(a^3/k), mass unit m. The scaled NC strengths
// are the dimensionless groups <theta^2> m^2 k / a^3 and <eta^2> a^3 / (k m^2).
ScaledSystem nondimensionalize(const OrbitElements& elements, const NCParams& nc);

// Unperturbed Kepler state at perihelion: x along +x, p along +y.
PhaseState kepler_state_at_perihelion(const OrbitElements& elements);

inline constexpr double kArcsecPerRadian = 180.0 * 3600.0 / std::numbers::pi;

double rad_per_rev_to_arcsec_per_century(double rad_per_rev, double revs_per_century);
double arcsec_per_century_to_rad_per_rev(double arcsec_per_century, double revs_per_century);

}  // namespace ncorbit
