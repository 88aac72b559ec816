#include "ncorbit/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>

#include <boost/math/tools/toms748_solve.hpp>

#include "dop853.hpp"
#include "ncorbit/analytic.hpp"
#include "ncorbit/dynamics.hpp"
#include "ncorbit/errors.hpp"

namespace ncorbit {

namespace {

using detail::State6;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Step sizes below this fraction of a period count as a collapsed controller.
constexpr double kMinStepFraction = 1e-14;
// Per-step error target relative to the caller's tolerance. Local errors
// accumulate over ~100 steps per orbit; this keeps the global energy and |L|
// drift over 100 orbits below the tolerance itself.
constexpr double kLocalErrorFraction = 0.01;
// |x.p| below this fraction of |x||p| is indistinguishable from zero.
constexpr double kRadialNoise = 1e-9;

State6 pack(const PhaseState& s) { return {s.x.x, s.x.y, s.x.z, s.p.x, s.p.y, s.p.z}; }

PhaseState unpack(const State6& y, double t) {
  return {Vec3{y[0], y[1], y[2]}, Vec3{y[3], y[4], y[5]}, t};
}

double radial_product(const State6& y) { return y[0] * y[3] + y[1] * y[4] + y[2] * y[5]; }

double radial_scale(const State6& y) {
  return std::sqrt((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) *
                   (y[3] * y[3] + y[4] * y[4] + y[5] * y[5]));
}

void validate_tolerance(double tolerance) {
  if (!(std::isfinite(tolerance) && tolerance > 0.0 && tolerance <= kMaxTolerance)) {
    throw ValidationError("tolerance", "must lie in (0, 1e-3]");
  }
}

class Propagator {
 public:
  Propagator(const OrbitElements& elem, const NCParams& nc, double tolerance)
      : elem_(elem), nc_(nc), tol_(tolerance * kLocalErrorFraction) {}

  State6 rhs(const State6& y) const {
    const Derivatives d = equations_of_motion(unpack(y, 0.0), elem_, nc_);
    return {d.dx_dt.x, d.dx_dt.y, d.dx_dt.z, d.dp_dt.x, d.dp_dt.y, d.dp_dt.z};
  }

  detail::StepAttempt attempt(const State6& y, const State6& f, double h) const {
    return detail::dop853_attempt([this](const State6& s) { return rhs(s); }, y, f, h, tol_,
                                  tol_);
  }

  double energy(const State6& y) const { return effective_hamiltonian(unpack(y, 0.0), elem_, nc_); }

 private:
  OrbitElements elem_;
  NCParams nc_;
  double tol_;
};

// Locates x.p = 0 inside an accepted step by re-stepping from its start.
// Returns the sub-step length and the state there.
std::pair<double, State6> locate_perihelion(const Propagator& prop, const State6& y,
                                            const State6& f, double h, double s_end) {
  auto g = [&](double tau) {
    if (tau <= 0.0) return radial_product(y);
    return radial_product(prop.attempt(y, f, tau).y);
  };
  const double s_start = radial_product(y);
  std::uintmax_t max_iter = 100;
  auto [lo, hi] = boost::math::tools::toms748_solve(
      g, 0.0, h, s_start, s_end, boost::math::tools::eps_tolerance<double>(52), max_iter);
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  const double tau = std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
  return {tau, tau <= 0.0 ? y : prop.attempt(y, f, tau).y};
}

}  // namespace

Trajectory integrate_for(const PhaseState& initial, const OrbitElements& elem,
                         const NCParams& nc, double duration, double tolerance) {
  validate_tolerance(tolerance);
  if (!(std::isfinite(duration) && duration > 0.0)) {
    throw ValidationError("duration", "must be > 0");
  }
  if (!is_finite(initial.x) || !is_finite(initial.p)) {
    throw ValidationError("initial", "state has non-finite components");
  }
  const ScaledSystem sys = nondimensionalize(elem, nc);
  const UnitScales& units = sys.scales;
  const Propagator prop(sys.elements, sys.nc, tolerance);

  PhaseState start = units.to_scaled(initial);
  if (!(norm(start.x) >= kSingularRadius)) {
    throw SingularityError("initial state is at the force centre");
  }
  const double t0 = start.t;
  const double t_end = t0 + duration / units.time;
  const double min_step = kMinStepFraction * kTwoPi;

  Trajectory traj;
  std::vector<PhaseState>& out = traj.samples;
  StepStats& stats = traj.step_stats;

  State6 y = pack(start);
  State6 f = prop.rhs(y);
  double t = t0;
  const double H0 = prop.energy(y);
  const Vec3 L0 = cross(start.x, start.p);
  const double L0_norm = norm(L0);

  auto record = [&](const State6& state, double time) {
    const PhaseState s = unpack(state, time);
    if (H0 != 0.0) {
      stats.max_energy_drift =
          std::max(stats.max_energy_drift, std::abs(prop.energy(state) - H0) / std::abs(H0));
    }
    if (L0_norm > 0.0) {
      const Vec3 L = cross(s.x, s.p);
      stats.max_L_drift = std::max(stats.max_L_drift, std::abs(norm(L) - L0_norm) / L0_norm);
      stats.max_L_direction_drift =
          std::max(stats.max_L_direction_drift, std::atan2(norm(cross(L, L0)), dot(L, L0)));
    }
    out.push_back(units.from_scaled(s));
  };

  record(y, t);
  {
    const double s0 = radial_product(y);
    if (std::abs(s0) <= 1e-14 * radial_scale(y) && radial_product(prop.attempt(y, f, 1e-6).y) > 0.0) {
      traj.perihelion_samples.push_back(0);
    }
  }

  double h = std::min(1e-3 * kTwoPi, t_end - t0);
  while (t < t_end) {
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }
    if (h < min_step && !last) {
      throw StepCollapseError("step size collapsed below 1e-14 of a period at t = " +
                              std::to_string(t * units.time));
    }
    const detail::StepAttempt step = prop.attempt(y, f, h);
    if (!(step.error <= 1.0)) {
      ++stats.steps_rejected;
      const double factor = std::isfinite(step.error)
                                ? std::max(0.2, 0.9 * std::pow(step.error, -1.0 / 8.0))
                                : 0.2;
      h *= factor;
      continue;
    }
    ++stats.steps_accepted;

    const double s_start = radial_product(y);
    const double s_end = radial_product(step.y);
    const bool minimum_inside =
        s_start < 0.0 && s_end >= 0.0 &&
        std::max(std::abs(s_start), std::abs(s_end)) > kRadialNoise * radial_scale(y);
    const double t_next = last ? t_end : t + h;
    if (minimum_inside) {
      if (s_end == 0.0) {
        record(step.y, t_next);
        traj.perihelion_samples.push_back(out.size() - 1);
      } else {
        const auto [tau, y_min] = locate_perihelion(prop, y, f, h, s_end);
        if (tau >= h * (1.0 - 1e-12)) {
          record(step.y, t_next);
          traj.perihelion_samples.push_back(out.size() - 1);
        } else {
          if (tau <= h * 1e-12) {
            if (traj.perihelion_samples.empty() ||
                traj.perihelion_samples.back() != out.size() - 1) {
              traj.perihelion_samples.push_back(out.size() - 1);
            }
          } else {
            record(y_min, t + tau);
            traj.perihelion_samples.push_back(out.size() - 1);
          }
          record(step.y, t_next);
        }
      }
    } else {
      record(step.y, t_next);
    }

    y = step.y;
    f = step.f;
    t = t_next;
    const double factor =
        step.error == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(step.error, -1.0 / 8.0), 0.2, 10.0);
    h *= factor;
  }
  return traj;
}

Trajectory integrate_orbit(const PhaseState& initial, const OrbitElements& elem,
                           const NCParams& nc, int n_orbits, double tolerance) {
  if (n_orbits < 1) throw ValidationError("n_orbits", "must be >= 1");
  elem.validate();
  return integrate_for(initial, elem, nc, n_orbits * elem.period(), tolerance);
}

std::vector<PerihelionPassage> detect_perihelion_passages(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.size() < 3) throw TooFewPassagesError("trajectory has fewer than three samples");

  double r_min = norm(s.front().x);
  double r_max = r_min;
  for (const auto& st : s) {
    const double r = norm(st.x);
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
  }
  if (r_max - r_min <= kRadialNoise * r_max) {
    throw AmbiguousMinimumError("no radial minima: the orbit is circular to within rounding");
  }

  const std::set<std::size_t> pinned(traj.perihelion_samples.begin(),
                                     traj.perihelion_samples.end());
  auto radial = [&](std::size_t i) { return dot(s[i].x, s[i].p); };
  auto significant = [&](std::size_t i) {
    return std::abs(radial(i)) > kRadialNoise * norm(s[i].x) * norm(s[i].p);
  };

  std::vector<PerihelionPassage> passages;
  auto push = [&](double t, double x, double y) {
    passages.push_back({t, std::atan2(y, x)});
  };

  if (pinned.count(0)) push(s[0].t, s[0].x.x, s[0].x.y);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!(radial(i) < 0.0 && radial(i + 1) >= 0.0)) continue;
    if (pinned.count(i)) {
      if (i != 0) push(s[i].t, s[i].x.x, s[i].x.y);
      continue;
    }
    if (pinned.count(i + 1)) {
      push(s[i + 1].t, s[i + 1].x.x, s[i + 1].x.y);
      continue;
    }
    if (!significant(i) && !significant(i + 1)) continue;

    // Quadratic refinement through the three samples around the smaller radius.
    std::size_t c = norm2(s[i].x) <= norm2(s[i + 1].x) ? i : i + 1;
    c = std::clamp<std::size_t>(c, 1, s.size() - 2);
    const PhaseState& a = s[c - 1];
    const PhaseState& b = s[c];
    const PhaseState& d = s[c + 1];
    const double max_gap = std::numbers::pi / 50.0;
    const double gap1 = std::atan2(norm(cross(a.x, b.x)), dot(a.x, b.x));
    const double gap2 = std::atan2(norm(cross(b.x, d.x)), dot(b.x, d.x));
    if (gap1 > max_gap || gap2 > max_gap) {
      throw AmbiguousMinimumError("samples too sparse near the perihelion at t = " +
                                  std::to_string(b.t));
    }
    // Lagrange basis on (t_a, t_b, t_d).
    const double ta = a.t, tb = b.t, td = d.t;
    auto lagrange = [&](double t, double fa, double fb, double fd) {
      return fa * (t - tb) * (t - td) / ((ta - tb) * (ta - td)) +
             fb * (t - ta) * (t - td) / ((tb - ta) * (tb - td)) +
             fd * (t - ta) * (t - tb) / ((td - ta) * (td - tb));
    };
    const double ra = norm2(a.x), rb = norm2(b.x), rd = norm2(d.x);
    // Vertex of the interpolating parabola of |x|^2.
    const double num = ra * (tb * tb - td * td) + rb * (td * td - ta * ta) + rd * (ta * ta - tb * tb);
    const double den = ra * (tb - td) + rb * (td - ta) + rd * (ta - tb);
    double t_min = den != 0.0 ? 0.5 * num / den : tb;
    t_min = std::clamp(t_min, ta, td);
    push(t_min, lagrange(t_min, a.x.x, b.x.x, d.x.x), lagrange(t_min, a.x.y, b.x.y, d.x.y));
  }

  if (passages.size() < 2) {
    throw TooFewPassagesError("found " + std::to_string(passages.size()) +
                              " perihelion passage(s); need at least 2");
  }
  for (std::size_t i = 1; i < passages.size(); ++i) {
    double delta = passages[i].argument - passages[i - 1].argument;
    delta = std::remainder(delta, kTwoPi);
    passages[i].argument = passages[i - 1].argument + delta;
  }
  return passages;
}

PrecessionMeasurement measure_precession(const OrbitElements& elem, const NCParams& nc,
                                         int n_orbits, double tolerance) {
  elem.validate();
  validate_tolerance(tolerance);
  if (n_orbits < 2) throw ValidationError("n_orbits", "need at least 2 orbits");
  if (!(elem.e > kMinMeasurableEccentricity)) {
    throw ValidationError("e", "eccentricity must exceed 0.01 for a measurable perihelion");
  }
  const double analytic = perihelion_shift(elem, nc);
  if (std::abs(analytic) >= kMaxPerturbativeShift) {
    throw PerturbativeRegimeError("analytic shift " + std::to_string(analytic) +
                                  " rad/rev is outside the perturbative regime (< 0.1)");
  }

  const PhaseState start = kepler_state_at_perihelion(elem);
  const Trajectory traj =
      integrate_for(start, elem, nc, (n_orbits + 0.5) * elem.period(), tolerance);

  PrecessionMeasurement m;
  m.per_passage_angles = detect_perihelion_passages(traj);
  const auto& pts = m.per_passage_angles;
  const double n = static_cast<double>(pts.size());
  m.n_revolutions = static_cast<int>(pts.size()) - 1;

  double mean_i = 0.0, mean_phi = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    mean_i += static_cast<double>(i);
    mean_phi += pts[i].argument;
  }
  mean_i /= n;
  mean_phi /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = static_cast<double>(i) - mean_i;
    sxx += dx * dx;
    sxy += dx * (pts[i].argument - mean_phi);
  }
  m.shift_per_rev = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double fit = mean_phi + m.shift_per_rev * (static_cast<double>(i) - mean_i);
    ss += (pts[i].argument - fit) * (pts[i].argument - fit);
  }
  m.fit_residual = std::sqrt(ss / n);
  return m;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const OrbitElements& elem,
                          const NCParams& nc) {
  out << "t,x,y,z,px,py,pz,H,Lz\n";
  out << std::setprecision(17);
  for (const auto& s : traj.samples) {
    const Vec3 L = angular_momentum(s);
    out << s.t << ',' << s.x.x << ',' << s.x.y << ',' << s.x.z << ',' << s.p.x << ','
        << s.p.y << ',' << s.p.z << ',' << effective_hamiltonian(s, elem, nc) << ',' << L.z
        << '\n';
  }
}

}  // namespace ncorbit
