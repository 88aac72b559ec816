#include "ncorbit/bounds.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "ncorbit/errors.hpp"
#include "ncorbit/kv_file.hpp"

namespace ncorbit {

namespace {

constexpr double kPi = std::numbers::pi;

// Nearest double to the decimal `value` rounded to one significant figure.
double round_one_significant(double value) {
  if (value == 0.0) return 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 0);
  double rounded = 0.0;
  std::from_chars(buf, res.ptr, rounded);
  return rounded;
}

void require_cap(double cap) {
  if (!(std::isfinite(cap) && cap >= 0.0)) throw ValidationError("cap", "must be finite and >= 0");
}

}  // namespace

RoundingMode parse_rounding_mode(const std::string& text) {
  if (text == "exact") return RoundingMode::exact;
  if (text == "paper") return RoundingMode::paper;
  throw ValidationError("rounding", "expected 'paper' or 'exact', got '" + text + "'");
}

const char* to_string(RoundingMode mode) {
  return mode == RoundingMode::paper ? "paper" : "exact";
}

void ObservationRecord::validate() const {
  if (!std::isfinite(observed_arcsec_per_century)) {
    throw ValidationError("observed_arcsec_per_century", "must be finite");
  }
  if (!(std::isfinite(sigma_arcsec_per_century) && sigma_arcsec_per_century >= 0.0)) {
    throw ValidationError("sigma_arcsec_per_century", "must be finite and >= 0");
  }
  if (!std::isfinite(gr_rad_per_rev)) throw ValidationError("gr_rad_per_rev", "must be finite");
  if (!(std::isfinite(revolutions_per_century) && revolutions_per_century > 0.0)) {
    throw ValidationError("revolutions_per_century", "must be > 0");
  }
  body.validate();
}

double ObservationRecord::observed_rad_per_rev() const {
  return arcsec_per_century_to_rad_per_rev(observed_arcsec_per_century, revolutions_per_century);
}

double ObservationRecord::sigma_rad_per_rev() const {
  return arcsec_per_century_to_rad_per_rev(sigma_arcsec_per_century, revolutions_per_century);
}

ObservationRecord observation_from_kv(const KeyValueFile& kv, const PhysicalConstants& consts) {
  kv.reject_unknown({"observed_arcsec_per_century", "sigma_arcsec_per_century", "gr_rad_per_rev",
                     "revolutions_per_century", "a_m", "e", "mass_kg", "source"});
  consts.validate();
  ObservationRecord obs;
  obs.observed_arcsec_per_century = kv.require_double("observed_arcsec_per_century");
  obs.sigma_arcsec_per_century = kv.require_double("sigma_arcsec_per_century");
  obs.gr_rad_per_rev = kv.require_double("gr_rad_per_rev");
  obs.revolutions_per_century = kv.require_double("revolutions_per_century");
  obs.body.a = kv.require_double("a_m");
  obs.body.e = kv.require_double("e");
  obs.body.m = kv.require_double("mass_kg");
  obs.body.k = consts.G * consts.solar_mass;
  obs.source = kv.require_string("source");
  try {
    obs.validate();
  } catch (const ValidationError& err) {
    std::string key = err.field();
    if (key == "a") key = "a_m";
    if (key == "m") key = "mass_kg";
    throw ParseError(kv.source(), kv.line(key), key, err.what());
  }
  return obs;
}

ObservationRecord load_observation(const std::filesystem::path& path,
                                   const PhysicalConstants& consts) {
  return observation_from_kv(KeyValueFile::load(path), consts);
}

double residual_cap(const ObservationRecord& obs, double sigma_multiplier, RoundingMode mode) {
  obs.validate();
  if (!(std::isfinite(sigma_multiplier) && sigma_multiplier > 0.0)) {
    throw ValidationError("sigma_multiplier", "must be > 0");
  }
  const double central = obs.observed_rad_per_rev() - obs.gr_rad_per_rev;
  const double cap = std::abs(central) + sigma_multiplier * obs.sigma_rad_per_rev();
  if (mode == RoundingMode::exact) return cap;
  return 2.0 * kPi * round_one_significant(cap / (2.0 * kPi));
}

double bound_theta(double cap, const OrbitElements& body, const PhysicalConstants& consts) {
  require_cap(cap);
  body.validate();
  const double one_m_e2 = 1.0 - body.e * body.e;
  const double a3 = body.a * body.a * body.a;
  const double theta_sq = cap * 8.0 * a3 * one_m_e2 * one_m_e2 * one_m_e2 /
                          (kPi * body.k * body.m * body.m * (4.0 + body.e * body.e));
  return consts.hbar * std::sqrt(theta_sq);
}

double bound_eta(double cap, const OrbitElements& body, const PhysicalConstants& consts) {
  require_cap(cap);
  body.validate();
  const double a3 = body.a * body.a * body.a;
  const double eta_sq =
      cap * 2.0 * body.k * body.m * body.m / (kPi * a3 * std::sqrt(1.0 - body.e * body.e));
  return consts.hbar * std::sqrt(eta_sq);
}

std::map<std::string, ParticleBound> particle_bounds(double theta_bound_composite,
                                                     double eta_bound_composite,
                                                     double composite_mass,
                                                     std::span<const ParticleSpec> particles,
                                                     const PhysicalConstants& consts) {
  if (!(std::isfinite(composite_mass) && composite_mass > 0.0)) {
    throw ValidationError("mass_kg", "composite mass must be > 0");
  }
  std::map<std::string, ParticleBound> out;
  for (const auto& particle : particles) {
    particle.validate();
    ParticleBound b;
    b.theta_bound = theta_bound_composite * (composite_mass / particle.mass);
    b.eta_bound = eta_bound_composite * (particle.mass / composite_mass);
    const double eta_sq = (b.eta_bound / consts.hbar) * (b.eta_bound / consts.hbar);
    b.p_min = minimal_momentum(eta_sq, consts.hbar);
    out[particle.label] = b;
  }
  return out;
}

std::vector<ParticleSpec> default_particles(const PhysicalConstants& consts) {
  return {{consts.electron_mass, "electron"}, {consts.nucleon_mass, "nucleon"}};
}

BoundReport run_pipeline(const ObservationRecord& obs, std::span<const ParticleSpec> particles,
                         const PhysicalConstants& consts, double sigma_multiplier,
                         RoundingMode mode) {
  consts.validate();
  BoundReport report;
  report.residual_cap = residual_cap(obs, sigma_multiplier, mode);
  report.theta_bound_composite = bound_theta(report.residual_cap, obs.body, consts);
  report.eta_bound_composite = bound_eta(report.residual_cap, obs.body, consts);
  report.per_particle = particle_bounds(report.theta_bound_composite, report.eta_bound_composite,
                                        obs.body.m, particles, consts);
  report.inputs_echo = InputsEcho{consts, obs, sigma_multiplier, mode};
  return report;
}

void write_report_table(std::ostream& out, const BoundReport& r) {
  const auto& obs = r.inputs_echo.observation;
  out << "Noncommutativity bounds from " << obs.source << " (rounding: "
      << to_string(r.inputs_echo.rounding) << ", " << r.inputs_echo.sigma_multiplier
      << " sigma)\n";
  out << std::scientific << std::setprecision(4);
  out << "  residual cap                     " << r.residual_cap << " rad/rev ("
      << r.residual_cap / (2.0 * kPi) << " x 2pi)\n";
  out << "  composite hbar*sqrt<theta^2>   < " << r.theta_bound_composite << " m^2\n";
  out << "  composite hbar*sqrt<eta^2>     < " << r.eta_bound_composite << " kg^2 m^2/s^2\n";
  out << "\n  " << std::left << std::setw(12) << "particle" << std::setw(16) << "theta [m^2]"
      << std::setw(22) << "eta [kg^2 m^2/s^2]" << "p_min [kg m/s]\n";
  for (const auto& [label, b] : r.per_particle) {
    out << "  " << std::setw(12) << label << std::setw(16) << b.theta_bound << std::setw(22)
        << b.eta_bound << b.p_min << '\n';
  }
  out << std::right << std::defaultfloat << std::setprecision(6);
}

}  // namespace ncorbit
