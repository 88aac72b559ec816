#include "ncorbit/harness.hpp"

#include <cmath>
#include <numbers>

#include "ncorbit/analytic.hpp"
#include "ncorbit/errors.hpp"
#include "ncorbit/integrator.hpp"

namespace ncorbit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

OrbitElements scaled_orbit(double e) { return OrbitElements{1.0, e, 1.0, 1.0}; }

}  // namespace

PerturbationKind parse_perturbation_kind(const std::string& text) {
  if (text == "theta") return PerturbationKind::theta;
  if (text == "eta") return PerturbationKind::eta;
  if (text == "mixed") return PerturbationKind::mixed;
  throw ValidationError("verify_kinds", "unknown perturbation kind '" + text + "'");
}

const char* to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::theta: return "theta";
    case PerturbationKind::eta: return "eta";
    case PerturbationKind::mixed: return "mixed";
  }
  return "?";
}

NCParams nc_for_case(const VerifyCase& c) {
  if (!(std::isfinite(c.epsilon) && c.epsilon > 0.0)) {
    throw ValidationError("verify_eps", "epsilon must be > 0");
  }
  const OrbitElements el = scaled_orbit(c.e);
  el.validate();
  const double per_theta = perihelion_shift(el, NCParams{1.0, 0.0, 1.0});
  const double per_eta = -perihelion_shift(el, NCParams{0.0, 1.0, 1.0});
  const double target = kTwoPi * c.epsilon;
  switch (c.kind) {
    case PerturbationKind::theta: return NCParams{target / per_theta, 0.0, 1.0};
    case PerturbationKind::eta: return NCParams{0.0, target / per_eta, 1.0};
    case PerturbationKind::mixed:
      return NCParams{1.25 * target / per_theta, 0.25 * target / per_eta, 1.0};
  }
  return {};
}

std::vector<VerifyCase> default_verify_grid() {
  std::vector<VerifyCase> grid;
  for (double e : {0.1, 0.2056, 0.5}) {
    for (double eps : {1e-6, 1e-5, 1e-4, 1e-3}) {
      for (auto kind : {PerturbationKind::theta, PerturbationKind::eta, PerturbationKind::mixed}) {
        grid.push_back({e, eps, kind});
      }
    }
  }
  return grid;
}

std::vector<VerifyRow> run_verification(const std::vector<VerifyCase>& cases,
                                        const VerifyOptions& options) {
  for (const auto& c : cases) {
    if (!(std::isfinite(c.e) && c.e >= 0.0 && c.e < 1.0)) {
      throw ValidationError("verify_e", "eccentricity must satisfy 0 <= e < 1");
    }
    if (!(std::isfinite(c.epsilon) && c.epsilon > 0.0)) {
      throw ValidationError("verify_eps", "epsilon must be > 0");
    }
  }
  std::function<VerifyRow(std::size_t)> run_case = [&](std::size_t i) {
    VerifyRow row;
    row.test_case = cases[i];
    row.tolerance = 0.01 + 10.0 * cases[i].epsilon;
    if (!(cases[i].e > kMinMeasurableEccentricity)) {
      row.status = VerifyStatus::skipped;
      row.note = "degenerate orbit: no perihelion for e <= 0.01";
      return row;
    }
    const OrbitElements el = scaled_orbit(cases[i].e);
    const NCParams nc = nc_for_case(cases[i]);
    row.analytic = options.analytic_override ? options.analytic_override(el, nc)
                                             : perihelion_shift(el, nc);
    try {
      row.measured = measure_precession(el, nc, options.n_orbits, options.tolerance).shift_per_rev;
    } catch (const Error& err) {
      row.status = VerifyStatus::fail;
      row.note = err.what();
      return row;
    }
    row.rel_discrepancy = std::abs(row.measured - row.analytic) / std::abs(row.analytic);
    row.status = row.rel_discrepancy < row.tolerance ? VerifyStatus::pass : VerifyStatus::fail;
    return row;
  };
  return parallel_map<VerifyRow>(cases.size(), options.threads, run_case);
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "e") return SweepAxis::e;
  if (text == "a") return SweepAxis::a;
  if (text == "theta_sq") return SweepAxis::theta_sq;
  if (text == "eta_sq") return SweepAxis::eta_sq;
  if (text == "m") return SweepAxis::m;
  throw ValidationError("sweep_axis", "expected one of e, a, theta_sq, eta_sq, m; got '" + text + "'");
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::e: return "e";
    case SweepAxis::a: return "a";
    case SweepAxis::theta_sq: return "theta_sq";
    case SweepAxis::eta_sq: return "eta_sq";
    case SweepAxis::m: return "m";
  }
  return "?";
}

SweepSpacing parse_sweep_spacing(const std::string& text) {
  if (text == "linear") return SweepSpacing::linear;
  if (text == "log") return SweepSpacing::log;
  throw ValidationError("sweep_spacing", "expected 'linear' or 'log', got '" + text + "'");
}

namespace {

std::pair<OrbitElements, NCParams> sweep_point(const SweepSpec& spec, double value) {
  OrbitElements el = spec.base_elements;
  NCParams nc = spec.base_nc;
  switch (spec.axis) {
    case SweepAxis::e: el.e = value; break;
    case SweepAxis::a: el.a = value; break;
    case SweepAxis::theta_sq: nc.theta_sq = value; break;
    case SweepAxis::eta_sq: nc.eta_sq = value; break;
    case SweepAxis::m:
      el.m = value;
      if (!(std::isfinite(value) && value > 0.0)) throw ValidationError("m", "must be > 0");
      nc = spec.hold_scaling ? rescale_params(spec.base_nc, value)
                             : NCParams{nc.theta_sq, nc.eta_sq, value};
      break;
  }
  return {el, nc};
}

}  // namespace

void SweepSpec::validate() const {
  if (count < 1) throw ValidationError("sweep_count", "grid needs at least one point");
  if (!std::isfinite(from)) throw ValidationError("sweep_from", "must be finite");
  if (!std::isfinite(to)) throw ValidationError("sweep_to", "must be finite");
  if (spacing == SweepSpacing::log && !(from > 0.0 && to > 0.0)) {
    throw ValidationError("sweep_spacing", "log spacing needs positive endpoints");
  }
  if (measure && (n_orbits < 2)) throw ValidationError("n_orbits", "need at least 2 orbits");
  if (measure && !(tolerance > 0.0 && tolerance <= 1e-3)) {
    throw ValidationError("tolerance", "must lie in (0, 1e-3]");
  }
  for (double v : {from, to}) {
    try {
      auto [el, nc] = sweep_point(*this, v);
      el.validate();
      nc.validate();
    } catch (const ValidationError& err) {
      throw ValidationError(v == from ? "sweep_from" : "sweep_to",
                            std::string("grid endpoint invalid: ") + err.what());
    }
  }
}

std::vector<double> SweepSpec::grid() const {
  std::vector<double> g;
  g.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    if (spacing == SweepSpacing::linear) {
      g.push_back(from + frac * (to - from));
    } else {
      g.push_back(std::exp(std::log(from) + frac * (std::log(to) - std::log(from))));
    }
  }
  g.front() = from;
  if (count > 1) g.back() = to;
  return g;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::vector<double> values = spec.grid();
  std::function<SweepRow(std::size_t)> eval = [&](std::size_t i) {
    SweepRow row;
    row.value = values[i];
    const auto [el, nc] = sweep_point(spec, values[i]);
    row.analytic = perihelion_shift(el, nc);
    if (spec.measure) {
      try {
        row.measured = measure_precession(el, nc, spec.n_orbits, spec.tolerance).shift_per_rev;
      } catch (const Error& err) {
        row.note = err.what();
      }
    }
    return row;
  };
  return parallel_map<SweepRow>(values.size(), spec.threads, eval);
}

}  // namespace ncorbit
