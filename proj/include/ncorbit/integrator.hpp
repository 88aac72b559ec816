#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ncorbit/core.hpp"

namespace ncorbit {

struct StepStats {
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
  double max_energy_drift = 0.0;     // max |H - H0| / |H0|
  double max_L_drift = 0.0;          // max ||L| - |L0|| / |L0|
  double max_L_direction_drift = 0.0;  // max angle between L and L0, rad
};

struct Trajectory {
  std::vector<PhaseState> samples;  // strictly increasing t
  // Indices of samples placed exactly on a perihelion passage (x.p = 0 with
  // the radius turning from decreasing to increasing).
  std::vector<std::size_t> perihelion_samples;
  StepStats step_stats;
};

// Accepted range for the per-step error tolerance.
inline constexpr double kMaxTolerance = 1e-3;

// Propagates the flow of effective_hamiltonian for n_orbits Kepler periods
// with an adaptive 8(5,3) embedded Runge-Kutta scheme. Integration runs in
// the scaled system; samples come back in the caller's units.
Trajectory integrate_orbit(const PhaseState& initial, const OrbitElements& elem,
                           const NCParams& nc, int n_orbits, double tolerance);

// As integrate_orbit, for an arbitrary duration (same units as initial.t).
Trajectory integrate_for(const PhaseState& initial, const OrbitElements& elem,
                         const NCParams& nc, double duration, double tolerance);

struct PerihelionPassage {
  double t = 0.0;
  double argument = 0.0;  // rad, unwrapped across passages
};

// Radial minima of the trajectory in time order. Passages the integrator
// already pinned are used as-is; others are refined by quadratic
// interpolation through the three samples around the minimum.
std::vector<PerihelionPassage> detect_perihelion_passages(const Trajectory& traj);

struct PrecessionMeasurement {
  double shift_per_rev = 0.0;  // rad/revolution, slope of argument vs passage index
  std::vector<PerihelionPassage> per_passage_angles;
  int n_revolutions = 0;
  double fit_residual = 0.0;  // RMS of the linear fit, rad
};

// Analytic |shift| at or above this is outside the perturbative regime.
inline constexpr double kMaxPerturbativeShift = 0.1;
// Below this eccentricity the perihelion is not reliably detectable.
inline constexpr double kMinMeasurableEccentricity = 0.01;

// Starts at perihelion, integrates n_orbits + 1/2 periods, and fits the
// perihelion arguments against passage index.
PrecessionMeasurement measure_precession(const OrbitElements& elem, const NCParams& nc,
                                         int n_orbits, double tolerance);

// Columns: t,x,y,z,px,py,pz,H,Lz with a header row.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const OrbitElements& elem,
                          const NCParams& nc);

}  // namespace ncorbit
