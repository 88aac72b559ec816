#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncorbit/core.hpp"

namespace ncorbit {

// Runs fn(0..count-1) on up to `threads` workers; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned threads,
                            const std::function<T(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Oracle verification: analytic shift vs integrated orbit.

enum class PerturbationKind { theta, eta, mixed };

PerturbationKind parse_perturbation_kind(const std::string& text);
const char* to_string(PerturbationKind kind);

struct VerifyCase {
  double e = 0.0;
  double epsilon = 0.0;  // |analytic shift| / 2 pi
  PerturbationKind kind = PerturbationKind::theta;
};

// Scaled-unit (a = k = m = 1) strengths giving an analytic shift of
// +2 pi eps (theta, mixed) or -2 pi eps (eta). Mixed splits the total as
// 5/4 from theta and -1/4 from eta.
NCParams nc_for_case(const VerifyCase& c);

enum class VerifyStatus { pass, fail, skipped };

struct VerifyRow {
  VerifyCase test_case;
  double analytic = 0.0;
  double measured = 0.0;
  double rel_discrepancy = 0.0;
  double tolerance = 0.0;  // 0.01 + 10 eps
  VerifyStatus status = VerifyStatus::skipped;
  std::string note;
};

struct VerifyOptions {
  int n_orbits = 50;
  double tolerance = 1e-12;
  unsigned threads = 1;
  // Replaces the closed-form reference; lets tests check that a wrong
  // formula is caught.
  std::function<double(const OrbitElements&, const NCParams&)> analytic_override;
};

std::vector<VerifyCase> default_verify_grid();

std::vector<VerifyRow> run_verification(const std::vector<VerifyCase>& cases,
                                        const VerifyOptions& options);

// ---------------------------------------------------------------------------
// Parameter sweeps.

enum class SweepAxis { e, a, theta_sq, eta_sq, m };
enum class SweepSpacing { linear, log };

SweepAxis parse_sweep_axis(const std::string& text);
const char* to_string(SweepAxis axis);
SweepSpacing parse_sweep_spacing(const std::string& text);

struct SweepSpec {
  SweepAxis axis = SweepAxis::e;
  double from = 0.0;
  double to = 0.0;
  int count = 1;
  SweepSpacing spacing = SweepSpacing::linear;
  OrbitElements base_elements;
  NCParams base_nc;
  // m-axis only: keep (A, B) of base_nc fixed instead of <theta^2>, <eta^2>.
  bool hold_scaling = true;
  bool measure = false;
  int n_orbits = 30;
  double tolerance = 1e-12;
  unsigned threads = 1;

  void validate() const;
  std::vector<double> grid() const;
};

struct SweepRow {
  double value = 0.0;
  double analytic = 0.0;
  std::optional<double> measured;
  std::string note;
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec);

}  // namespace ncorbit

#include "ncorbit/detail/parallel_map.hpp"
