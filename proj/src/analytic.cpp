#include "ncorbit/analytic.hpp"

#include <cmath>
#include <numbers>

#include "ncorbit/errors.hpp"

namespace ncorbit {

namespace {

constexpr double kPi = std::numbers::pi;

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// pi k (4 + e^2) / (8 a^3 (1 - e^2)^3)
double theta_coefficient(const OrbitElements& el) {
  const double one_m_e2 = 1.0 - el.e * el.e;
  return kPi * el.k * (4.0 + el.e * el.e) /
         (8.0 * el.a * el.a * el.a * one_m_e2 * one_m_e2 * one_m_e2);
}

// pi a^3 sqrt(1 - e^2) / (2 k)
double eta_coefficient(const OrbitElements& el) {
  return kPi * el.a * el.a * el.a * std::sqrt(1.0 - el.e * el.e) / (2.0 * el.k);
}

}  // namespace

void ParticleSpec::validate() const {
  if (!(std::isfinite(mass) && mass > 0.0)) {
    throw ValidationError("mass", "particle '" + label + "' needs a positive mass");
  }
}

NCParams nc_from_constants(double c_theta, double c_eta, double planck_length, double mass) {
  if (!(std::isfinite(planck_length) && planck_length > 0.0)) {
    throw ValidationError("planck_length", "must be > 0");
  }
  const double denom = 2.0 * planck_length * planck_length;
  NCParams nc{3.0 * c_theta * c_theta / denom, 3.0 * c_eta * c_eta / denom, mass};
  nc.validate();
  return nc;
}

ScalingConstants scaling_constants(const NCParams& nc) {
  nc.validate();
  return {nc.A(), nc.B()};
}

NCParams rescale_params(const NCParams& nc, double target_mass) {
  nc.validate();
  if (!(std::isfinite(target_mass) && target_mass > 0.0)) {
    throw ValidationError("target_mass", "must be > 0");
  }
  const double ratio = nc.mass / target_mass;
  return NCParams{nc.theta_sq * ratio * ratio, nc.eta_sq / (ratio * ratio), target_mass};
}

NCParams composite_params(std::span<const std::pair<ParticleSpec, NCParams>> particles) {
  if (particles.empty()) throw ValidationError("particles", "composite needs at least one particle");
  double total_mass = 0.0;
  const ScalingConstants ref = scaling_constants(particles.front().second);
  for (const auto& [spec, nc] : particles) {
    spec.validate();
    if (!close_rel(spec.mass, nc.mass, kScalingTolerance)) {
      throw ValidationError("mass", "particle '" + spec.label +
                                        "' carries NC parameters for a different mass");
    }
    const ScalingConstants sc = scaling_constants(nc);
    if (!close_rel(sc.A, ref.A, kScalingTolerance) || !close_rel(sc.B, ref.B, kScalingTolerance)) {
      throw InconsistentScalingError("particle '" + spec.label +
                                     "' violates the mass-scaling conditions (A, B differ)");
    }
    total_mass += spec.mass;
  }
  return NCParams::from_scaling(ref.A, ref.B, total_mass);
}

ShiftTerms perihelion_shift_terms(const OrbitElements& elem, const NCParams& nc) {
  elem.validate();
  nc.validate();
  const double m2 = elem.m * elem.m;
  return {nc.theta_sq * m2 * theta_coefficient(elem), 0.0 - nc.eta_sq * eta_coefficient(elem) / m2};
}

double perihelion_shift(const OrbitElements& elem, const NCParams& nc) {
  return perihelion_shift_terms(elem, nc).total();
}

double perihelion_shift_massless(const OrbitElements& elem, double A, double B) {
  OrbitElements el = elem;
  el.m = 1.0;
  el.validate();
  return A * theta_coefficient(el) - B * eta_coefficient(el);
}

double minimal_momentum(double eta_sq, double hbar) {
  if (!(std::isfinite(eta_sq) && eta_sq >= 0.0)) throw ValidationError("eta_sq", "must be >= 0");
  return std::pow(1.5 * hbar * hbar * eta_sq, 0.25);
}

}  // namespace ncorbit
