#pragma once

#include <span>
#include <string>
#include <utility>

#include "ncorbit/core.hpp"

namespace ncorbit {

struct ParticleSpec {
  double mass = 0.0;  // kg
  std::string label;

  void validate() const;
};

// <theta^2> = 3 c_theta^2 / (2 l_P^2), <eta^2> = 3 c_eta^2 / (2 l_P^2), in
// whatever units c_theta and c_eta carry, attached to `mass`.
NCParams nc_from_constants(double c_theta, double c_eta, double planck_length,
                           double mass = 1.0);

struct ScalingConstants {
  double A = 0.0;  // <theta^2> m^2
  double B = 0.0;  // <eta^2> / m^2
};

ScalingConstants scaling_constants(const NCParams& nc);

// Moves NC strengths to another mass at fixed (A, B).
NCParams rescale_params(const NCParams& nc, double target_mass);

// Relative tolerance on (A, B) agreement between constituents.
inline constexpr double kScalingTolerance = 1e-12;

// Centre-of-mass parameters of a body built from `particles`:
// <(theta^c)^2> = A / M^2, <(eta^c)^2> = B M^2 with M the total mass.
NCParams composite_params(std::span<const std::pair<ParticleSpec, NCParams>> particles);

struct ShiftTerms {
  double theta_term = 0.0;  // rad/rev, >= 0
  double eta_term = 0.0;    // rad/rev, <= 0
  double total() const { return theta_term + eta_term; }
};

// Perihelion advance per revolution to second order in the NC strengths,
// which are taken as attached to elem.m.
ShiftTerms perihelion_shift_terms(const OrbitElements& elem, const NCParams& nc);
double perihelion_shift(const OrbitElements& elem, const NCParams& nc);

// Same quantity written through the mass-independent constants; `elem.m`
// is ignored.
double perihelion_shift_massless(const OrbitElements& elem, double A, double B);

// (3 hbar^2 <eta^2> / 2)^(1/4).
double minimal_momentum(double eta_sq, double hbar);

}  // namespace ncorbit
