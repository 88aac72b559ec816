#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ncorbit/analytic.hpp"
#include "ncorbit/core.hpp"

namespace ncorbit {

class KeyValueFile;

enum class RoundingMode {
  exact,  // no intermediate rounding
  paper,  // cap rounded to one significant figure in units of 2 pi rad/rev
};

RoundingMode parse_rounding_mode(const std::string& text);
const char* to_string(RoundingMode mode);

struct ObservationRecord {
  double observed_arcsec_per_century = 0.0;
  double sigma_arcsec_per_century = 0.0;  // 1 sigma
  double gr_rad_per_rev = 0.0;
  double revolutions_per_century = 0.0;
  OrbitElements body;  // k = G * M_sun, m = body mass
  std::string source;

  void validate() const;

  double observed_rad_per_rev() const;
  double sigma_rad_per_rev() const;
};

// Keys: observed_arcsec_per_century, sigma_arcsec_per_century, gr_rad_per_rev,
// revolutions_per_century, a_m, e, mass_kg, source. The central strength is
// G * solar_mass from `consts`.
ObservationRecord observation_from_kv(const KeyValueFile& kv, const PhysicalConstants& consts);
ObservationRecord load_observation(const std::filesystem::path& path,
                                   const PhysicalConstants& consts);

// |observed - GR| + sigma_multiplier * sigma, in rad/rev.
double residual_cap(const ObservationRecord& obs, double sigma_multiplier,
                    RoundingMode mode = RoundingMode::exact);

// hbar sqrt(<(theta^c)^2>) in m^2 for a theta-only shift saturating `cap`.
double bound_theta(double cap, const OrbitElements& body, const PhysicalConstants& consts);
// hbar sqrt(<(eta^c)^2>) in kg^2 m^2 / s^2 for an eta-only shift saturating `cap`.
double bound_eta(double cap, const OrbitElements& body, const PhysicalConstants& consts);

struct ParticleBound {
  double theta_bound = 0.0;  // m^2
  double eta_bound = 0.0;    // kg^2 m^2 / s^2
  double p_min = 0.0;        // kg m / s
};

// Moves composite bounds to each particle at fixed (A, B): the theta bound
// scales with M / m, the eta bound with m / M.
std::map<std::string, ParticleBound> particle_bounds(double theta_bound_composite,
                                                     double eta_bound_composite,
                                                     double composite_mass,
                                                     std::span<const ParticleSpec> particles,
                                                     const PhysicalConstants& consts);

std::vector<ParticleSpec> default_particles(const PhysicalConstants& consts);

struct InputsEcho {
  PhysicalConstants constants;
  ObservationRecord observation;
  double sigma_multiplier = 0.0;
  RoundingMode rounding = RoundingMode::exact;
};

// Upper bounds; only as good as the echoed inputs.
struct BoundReport {
  double residual_cap = 0.0;
  double theta_bound_composite = 0.0;
  double eta_bound_composite = 0.0;
  std::map<std::string, ParticleBound> per_particle;
  InputsEcho inputs_echo;
};

BoundReport run_pipeline(const ObservationRecord& obs, std::span<const ParticleSpec> particles,
                         const PhysicalConstants& consts, double sigma_multiplier,
                         RoundingMode mode = RoundingMode::exact);

// Human-readable table.
void write_report_table(std::ostream& out, const BoundReport& report);

}  // namespace ncorbit
