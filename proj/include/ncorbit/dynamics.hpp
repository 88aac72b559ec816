#pragma once

#include "ncorbit/core.hpp"

namespace ncorbit {

struct Derivatives {
  Vec3 dx_dt;
  Vec3 dp_dt;
};

// States closer to the origin than this fraction of the semi-major axis are
// rejected; the r^-7 terms are useless there.
inline constexpr double kSingularRadius = 1e-9;

Vec3 angular_momentum(const PhaseState& state);

// p^2/2m - mk/r.
double kepler_hamiltonian(const PhaseState& state, const OrbitElements& elem);

// p^2/2m - mk/r + <eta^2> r^2/(12m) - <theta^2> m k L^2/(8 r^5)
//   + <theta^2> m k p^2/(12 r^3), with L^2 = r^2 p^2 - (x.p)^2 as a function
// of the canonical variables. The NC strengths are taken as attached to
// elem.m.
double effective_hamiltonian(const PhaseState& state, const OrbitElements& elem,
                             const NCParams& nc);

// Hamilton's equations of effective_hamiltonian, differentiating through L^2.
Derivatives equations_of_motion(const PhaseState& state, const OrbitElements& elem,
                                const NCParams& nc);

// u = p/m - m k (L x x) / (r L^2). Conserved by the Kepler flow.
Vec3 hamilton_vector(const PhaseState& state, const OrbitElements& elem);

// Instantaneous precession rate of the Hamilton vector to second order in
// the NC strengths. The eccentricity comes from `elem` (the orbit's
// osculating value at the start), not from the instantaneous state.
Vec3 precession_rate(const PhaseState& state, const OrbitElements& elem, const NCParams& nc);

// Eccentricity of the Kepler orbit through `state`.
double osculating_eccentricity(const PhaseState& state, const OrbitElements& elem);

}  // namespace ncorbit
