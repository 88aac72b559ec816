#include "ncorbit/core.hpp"

#include <cmath>

#include "ncorbit/errors.hpp"
#include "ncorbit/kv_file.hpp"

namespace ncorbit {

namespace {

void require_positive(const char* field, double v) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw ValidationError(field, "must be finite and > 0 (got " + std::to_string(v) + ")");
  }
}

}  // namespace

void PhysicalConstants::validate() const {
  require_positive("G", G);
  require_positive("hbar", hbar);
  require_positive("planck_length", planck_length);
  require_positive("solar_mass", solar_mass);
  require_positive("electron_mass", electron_mass);
  require_positive("nucleon_mass", nucleon_mass);
}

PhysicalConstants PhysicalConstants::from_kv(const KeyValueFile& kv,
                                             const PhysicalConstants& base) {
  kv.reject_unknown(
      {"G", "hbar", "planck_length", "solar_mass", "electron_mass", "nucleon_mass"});
  PhysicalConstants c = base;
  c.G = kv.get_double("G").value_or(c.G);
  c.hbar = kv.get_double("hbar").value_or(c.hbar);
  c.planck_length = kv.get_double("planck_length").value_or(c.planck_length);
  c.solar_mass = kv.get_double("solar_mass").value_or(c.solar_mass);
  c.electron_mass = kv.get_double("electron_mass").value_or(c.electron_mass);
  c.nucleon_mass = kv.get_double("nucleon_mass").value_or(c.nucleon_mass);
  c.validate();
  return c;
}

PhysicalConstants PhysicalConstants::from_kv(const KeyValueFile& kv) {
  return from_kv(kv, PhysicalConstants{});
}

PhysicalConstants PhysicalConstants::load(const std::filesystem::path& path) {
  return from_kv(KeyValueFile::load(path));
}

void NCParams::validate() const {
  if (!(std::isfinite(theta_sq) && theta_sq >= 0.0)) {
    throw ValidationError("theta_sq", "must be finite and >= 0");
  }
  if (!(std::isfinite(eta_sq) && eta_sq >= 0.0)) {
    throw ValidationError("eta_sq", "must be finite and >= 0");
  }
  require_positive("mass", mass);
  if (!std::isfinite(A()) || !std::isfinite(B())) {
    throw ValidationError("theta_sq", "scaling constants A, B overflow");
  }
}

NCParams NCParams::from_scaling(double A, double B, double mass) {
  require_positive("mass", mass);
  NCParams nc{A / (mass * mass), B * mass * mass, mass};
  nc.validate();
  return nc;
}

void OrbitElements::validate() const {
  require_positive("a", a);
  if (!(std::isfinite(e) && e >= 0.0 && e < 1.0)) {
    throw ValidationError("e", "eccentricity must satisfy 0 <= e < 1 (got " +
                                   std::to_string(e) + ")");
  }
  require_positive("k", k);
  require_positive("m", m);
}

double OrbitElements::period() const {
  return 2.0 * std::numbers::pi * std::sqrt(a * a * a / k);
}

PhaseState UnitScales::to_scaled(const PhaseState& s) const {
  return {s.x / length, s.p / momentum(), s.t / time};
}

PhaseState UnitScales::from_scaled(const PhaseState& s) const {
  return {s.x * length, s.p * momentum(), s.t * time};
}

ScaledSystem nondimensionalize(const OrbitElements& elements, const NCParams& nc) {
  elements.validate();
  nc.validate();
  UnitScales scales{elements.a, std::sqrt(elements.a * elements.a * elements.a / elements.k),
                    elements.m};
  ScaledSystem out;
  out.scales = scales;
  out.elements = OrbitElements{1.0, elements.e, 1.0, 1.0};
  // theta_sq / (T^2/M^2) = theta m^2 k / a^3; eta_sq / (M^2/T^2) = eta a^3 / (k m^2).
  out.nc = NCParams{nc.theta_sq / scales.theta_sq(), nc.eta_sq / scales.eta_sq(),
                    nc.mass / scales.mass};
  return out;
}

PhaseState kepler_state_at_perihelion(const OrbitElements& el) {
  el.validate();
  const double r = el.a * (1.0 - el.e);
  const double speed = std::sqrt(el.k * (1.0 + el.e) / (el.a * (1.0 - el.e)));
  return PhaseState{Vec3{r, 0.0, 0.0}, Vec3{0.0, el.m * speed, 0.0}, 0.0};
}

double rad_per_rev_to_arcsec_per_century(double rad_per_rev, double revs_per_century) {
  return rad_per_rev * revs_per_century * kArcsecPerRadian;
}

double arcsec_per_century_to_rad_per_rev(double arcsec_per_century, double revs_per_century) {
  return arcsec_per_century / kArcsecPerRadian / revs_per_century;
}

}  // namespace ncorbit
