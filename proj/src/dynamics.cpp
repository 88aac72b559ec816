#include "ncorbit/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ncorbit/errors.hpp"

namespace ncorbit {

namespace {

double checked_radius(const PhaseState& s, const OrbitElements& elem) {
  const double r = norm(s.x);
  if (!(r >= kSingularRadius * elem.a)) {
    throw SingularityError("state too close to the force centre (|x| = " + std::to_string(r) +
                           ")");
  }
  return r;
}

}  // namespace

Vec3 angular_momentum(const PhaseState& state) { return cross(state.x, state.p); }

double kepler_hamiltonian(const PhaseState& s, const OrbitElements& elem) {
  const double r = checked_radius(s, elem);
  return norm2(s.p) / (2.0 * elem.m) - elem.m * elem.k / r;
}

double effective_hamiltonian(const PhaseState& s, const OrbitElements& elem, const NCParams& nc) {
  const double r = checked_radius(s, elem);
  const double m = elem.m;
  const double k = elem.k;
  const double p2 = norm2(s.p);
  const double L2 = norm2(cross(s.x, s.p));
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double mk_theta = nc.theta_sq * m * k;
  return p2 / (2.0 * m) - m * k / r + nc.eta_sq * r2 / (12.0 * m) -
         mk_theta * L2 / (8.0 * r3 * r2) + mk_theta * p2 / (12.0 * r3);
}

Derivatives equations_of_motion(const PhaseState& s, const OrbitElements& elem,
                                const NCParams& nc) {
  const double r = checked_radius(s, elem);
  const double m = elem.m;
  const double k = elem.k;
  const Vec3& x = s.x;
  const Vec3& p = s.p;
  const double p2 = norm2(p);
  const double xp = dot(x, p);
  const double L2 = norm2(cross(x, p));
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double r5 = r3 * r2;
  const double r7 = r5 * r2;
  const double mk_theta = nc.theta_sq * m * k;

  // dL^2/dx = 2 p^2 x - 2 (x.p) p,  dL^2/dp = 2 r^2 p - 2 (x.p) x.
  // dH/dp = p/m - mk theta/(8 r^5) dL^2/dp + mk theta p/(6 r^3)
  const double p_coeff = 1.0 / m - mk_theta / (4.0 * r3) + mk_theta / (6.0 * r3);
  const double x_coeff_in_dp = mk_theta * xp / (4.0 * r5);
  Vec3 dH_dp = p * p_coeff + x * x_coeff_in_dp;

  // dH/dx = mk x/r^3 + eta x/(6m) - mk theta [dL^2/dx/(8 r^5) - 5 L^2 x/(8 r^7)]
  //         - mk theta p^2 x/(4 r^5)
  const double x_coeff = m * k / r3 + nc.eta_sq / (6.0 * m) - mk_theta * p2 / (4.0 * r5) +
                         5.0 * mk_theta * L2 / (8.0 * r7) - mk_theta * p2 / (4.0 * r5);
  const double p_coeff_in_dx = mk_theta * xp / (4.0 * r5);
  Vec3 dH_dx = x * x_coeff + p * p_coeff_in_dx;

  return Derivatives{dH_dp, -dH_dx};
}

Vec3 hamilton_vector(const PhaseState& s, const OrbitElements& elem) {
  const double r = checked_radius(s, elem);
  const Vec3 L = angular_momentum(s);
  const double L2 = norm2(L);
  if (!(L2 > 0.0)) throw DegenerateOrbitError("hamilton_vector: radial orbit (L = 0)");
  return s.p / elem.m - cross(L, s.x) * (elem.m * elem.k / (r * L2));
}

Vec3 precession_rate(const PhaseState& s, const OrbitElements& elem, const NCParams& nc) {
  const double r = checked_radius(s, elem);
  const Vec3 Lvec = angular_momentum(s);
  const double L2 = norm2(Lvec);
  if (!(L2 > 0.0)) throw DegenerateOrbitError("precession_rate: radial orbit (L = 0)");
  if (!(elem.e > 0.0)) {
    throw DegenerateOrbitError("precession_rate: circular orbit (e = 0) has no perihelion");
  }
  const double m = elem.m;
  const double k = elem.k;
  const double e2 = elem.e * elem.e;
  const double p2 = norm2(s.p);
  const double m3 = m * m * m;
  const double r2 = r * r;
  const double r4 = r2 * r2;
  const double r5 = r4 * r;
  const double r6 = r4 * r2;
  const double r7 = r6 * r;

  const double theta_bracket = 5.0 * L2 * L2 / (8.0 * k * m3 * r7 * e2) -
                               p2 * L2 / (2.0 * m3 * r5 * k * e2) + p2 / (4.0 * m * e2 * r4) -
                               7.0 * L2 / (24.0 * m * r6 * e2) - m * k / (12.0 * r5 * e2);
  const double eta_bracket =
      L2 / (6.0 * m3 * m * m * k * k * e2) - r / (6.0 * m3 * k * e2);
  return Lvec * (nc.theta_sq * theta_bracket + nc.eta_sq * eta_bracket);
}

double osculating_eccentricity(const PhaseState& s, const OrbitElements& elem) {
  const double L2 = norm2(angular_momentum(s));
  if (L2 > 0.0) {
    // |u| = m k e / L avoids the cancellation in 1 + 2 E L^2 / (m^3 k^2) near e = 0.
    return norm(hamilton_vector(s, elem)) * std::sqrt(L2) / (elem.m * elem.k);
  }
  checked_radius(s, elem);
  return 1.0;
}

}  // namespace ncorbit
