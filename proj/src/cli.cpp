#include "ncorbit/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncorbit/analytic.hpp"
#include "ncorbit/bounds.hpp"
#include "ncorbit/core.hpp"
#include "ncorbit/errors.hpp"
#include "ncorbit/harness.hpp"
#include "ncorbit/integrator.hpp"
#include "ncorbit/kv_file.hpp"

#ifndef NCORBIT_DEFAULT_DATA_DIR
#define NCORBIT_DEFAULT_DATA_DIR "data"
#endif

namespace ncorbit::cli {

using nlohmann::json;

namespace {

// Config schema. Orbit keys default to the observation file's body.
const std::set<std::string> kConfigKeys = {
    // inputs
    "observation", "particles",
    // orbit
    "a_m", "e", "mass_kg", "central_mass_kg", "k",
    // noncommutativity (one of each group)
    "theta_sq", "theta_bound", "scaling_A", "eta_sq", "eta_bound", "scaling_B",
    // numerics / reporting
    "revolutions_per_century", "n_orbits", "tolerance", "sigma_multiplier", "rounding",
    "threads",
    // sweep
    "sweep_axis", "sweep_from", "sweep_to", "sweep_count", "sweep_spacing", "sweep_measure",
    "sweep_hold_scaling",
    // verify
    "verify_e", "verify_eps", "verify_kinds", "verify_flip_sign"};

struct Context {
  std::string command;
  KeyValueFile config;
  PhysicalConstants consts;
  std::filesystem::path out_path;
  bool timestamp = true;
  std::ostream* out = nullptr;
};

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write output file " + path.string());
  f << text;
}

void write_json(const Context& ctx, json doc) {
  if (ctx.out_path.empty()) return;
  if (ctx.timestamp) doc["generated_at"] = timestamp_now();
  write_text(ctx.out_path, doc.dump(2) + "\n");
}

// Maps a library field name to the config key that supplies it.
std::string config_key_for(const std::string& field) {
  static const std::map<std::string, std::string> names = {
      {"a", "a_m"}, {"m", "mass_kg"}, {"mass", "mass_kg"}};
  auto it = names.find(field);
  return it == names.end() ? field : it->second;
}

template <class Fn>
auto with_config_keys(Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& err) {
    const std::string what = err.what();
    const std::string prefix = err.field() + ": ";
    throw ValidationError(config_key_for(err.field()),
                          what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what);
  }
}

std::filesystem::path observation_path(const Context& ctx) {
  if (auto p = ctx.config.get_string("observation")) return *p;
  return data_dir() / "mercury.obs";
}

ObservationRecord load_default_observation(const Context& ctx) {
  return load_observation(observation_path(ctx), ctx.consts);
}

OrbitElements orbit_from_config(const Context& ctx) {
  const KeyValueFile& kv = ctx.config;
  OrbitElements el;
  const bool all_given = kv.has("a_m") && kv.has("e") && kv.has("mass_kg");
  if (!all_given) {
    el = load_default_observation(ctx).body;
  }
  el.a = kv.get_double("a_m").value_or(el.a);
  el.e = kv.get_double("e").value_or(el.e);
  el.m = kv.get_double("mass_kg").value_or(el.m);
  if (kv.has("k") && kv.has("central_mass_kg")) {
    throw ValidationError("k", "give either k or central_mass_kg, not both");
  }
  if (auto k = kv.get_double("k")) {
    el.k = *k;
  } else {
    el.k = ctx.consts.G * kv.get_double("central_mass_kg").value_or(ctx.consts.solar_mass);
  }
  with_config_keys([&] { el.validate(); });
  return el;
}

NCParams nc_from_config(const Context& ctx, double mass) {
  const KeyValueFile& kv = ctx.config;
  auto pick = [&](const char* direct, const char* bound, const char* scaling) -> std::optional<std::string> {
    int given = kv.has(direct) + kv.has(bound) + kv.has(scaling);
    if (given > 1) {
      throw ValidationError(direct, std::string("give only one of ") + direct + ", " + bound +
                                        ", " + scaling);
    }
    if (kv.has(direct)) return std::string(direct);
    if (kv.has(bound)) return std::string(bound);
    if (kv.has(scaling)) return std::string(scaling);
    return std::nullopt;
  };
  NCParams nc{0.0, 0.0, mass};
  const double hbar = ctx.consts.hbar;
  if (auto key = pick("theta_sq", "theta_bound", "scaling_A")) {
    const double v = *kv.get_double(*key);
    if (!(v >= 0.0)) throw ValidationError(*key, "must be >= 0");
    if (*key == "theta_sq") nc.theta_sq = v;
    if (*key == "theta_bound") nc.theta_sq = (v / hbar) * (v / hbar);
    if (*key == "scaling_A") nc.theta_sq = v / (mass * mass);
  }
  if (auto key = pick("eta_sq", "eta_bound", "scaling_B")) {
    const double v = *kv.get_double(*key);
    if (!(v >= 0.0)) throw ValidationError(*key, "must be >= 0");
    if (*key == "eta_sq") nc.eta_sq = v;
    if (*key == "eta_bound") nc.eta_sq = (v / hbar) * (v / hbar);
    if (*key == "scaling_B") nc.eta_sq = v * mass * mass;
  }
  with_config_keys([&] { nc.validate(); });
  return nc;
}

double tolerance_from_config(const Context& ctx) {
  const double tol = ctx.config.get_double("tolerance").value_or(1e-12);
  if (!(tol > 0.0 && tol <= kMaxTolerance)) {
    throw ValidationError("tolerance", "must lie in (0, 1e-3]");
  }
  return tol;
}

int n_orbits_from_config(const Context& ctx, int fallback, int minimum) {
  const long n = ctx.config.get_integer("n_orbits").value_or(fallback);
  if (n < minimum || n > 100000) {
    throw ValidationError("n_orbits", "must lie in [" + std::to_string(minimum) + ", 100000]");
  }
  return static_cast<int>(n);
}

unsigned threads_from_config(const Context& ctx) {
  const long hw = std::max(1u, std::thread::hardware_concurrency());
  const long n = ctx.config.get_integer("threads").value_or(hw);
  if (n < 1 || n > 1024) throw ValidationError("threads", "must lie in [1, 1024]");
  return static_cast<unsigned>(n);
}

double revolutions_per_century(const Context& ctx, const OrbitElements& el) {
  if (auto r = ctx.config.get_double("revolutions_per_century")) {
    if (!(*r > 0.0)) throw ValidationError("revolutions_per_century", "must be > 0");
    return *r;
  }
  constexpr double kSecondsPerJulianCentury = 36525.0 * 86400.0;
  return kSecondsPerJulianCentury / el.period();
}

json elements_json(const OrbitElements& el) {
  return {{"a", el.a}, {"e", el.e}, {"k", el.k}, {"m", el.m}};
}

json nc_json(const NCParams& nc) {
  return {{"theta_sq", nc.theta_sq}, {"eta_sq", nc.eta_sq}, {"mass", nc.mass},
          {"A", nc.A()}, {"B", nc.B()}};
}

std::string fmt(double v, int precision = 17) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_shift(Context& ctx) {
  const OrbitElements el = orbit_from_config(ctx);
  const NCParams nc = nc_from_config(ctx, el.m);
  const double revs = revolutions_per_century(ctx, el);
  const ShiftTerms terms = perihelion_shift_terms(el, nc);

  std::ostream& out = *ctx.out;
  auto row = [&](const char* name, double rad) {
    out << "  " << std::left << std::setw(8) << name << std::right << std::setw(24)
        << fmt(rad, 10) << std::setw(24) << fmt(rad_per_rev_to_arcsec_per_century(rad, revs), 10)
        << '\n';
  };
  out << "perihelion shift      " << std::setw(12) << "rad/rev" << std::setw(24)
      << "arcsec/century\n";
  row("theta", terms.theta_term);
  row("eta", terms.eta_term);
  row("total", terms.total());

  write_json(ctx, {{"command", "shift"},
                   {"elements", elements_json(el)},
                   {"nc", nc_json(nc)},
                   {"revolutions_per_century", revs},
                   {"theta_term_rad_per_rev", terms.theta_term},
                   {"eta_term_rad_per_rev", terms.eta_term},
                   {"total_rad_per_rev", terms.total()},
                   {"theta_term_arcsec_per_century",
                    rad_per_rev_to_arcsec_per_century(terms.theta_term, revs)},
                   {"eta_term_arcsec_per_century",
                    rad_per_rev_to_arcsec_per_century(terms.eta_term, revs)},
                   {"total_arcsec_per_century",
                    rad_per_rev_to_arcsec_per_century(terms.total(), revs)}});
  return kSuccess;
}

int cmd_simulate(Context& ctx) {
  const OrbitElements el = orbit_from_config(ctx);
  const NCParams nc = nc_from_config(ctx, el.m);
  const double tol = tolerance_from_config(ctx);
  const int n_orbits = n_orbits_from_config(ctx, 30, 1);

  const Trajectory traj =
      integrate_orbit(kepler_state_at_perihelion(el), el, nc, n_orbits, tol);
  std::ostream& out = *ctx.out;
  const StepStats& st = traj.step_stats;
  out << "orbits            " << n_orbits << '\n'
      << "samples           " << traj.samples.size() << '\n'
      << "steps             " << st.steps_accepted << " accepted, " << st.steps_rejected
      << " rejected\n"
      << "energy drift      " << fmt(st.max_energy_drift, 4) << '\n'
      << "|L| drift         " << fmt(st.max_L_drift, 4) << '\n'
      << "L direction drift " << fmt(st.max_L_direction_drift, 4) << " rad\n"
      << "analytic shift    " << fmt(perihelion_shift(el, nc), 10) << " rad/rev\n";
  if (el.e > kMinMeasurableEccentricity && n_orbits >= 2) {
    const auto m = measure_precession(el, nc, n_orbits, tol);
    out << "measured shift    " << fmt(m.shift_per_rev, 10) << " rad/rev over "
        << m.n_revolutions << " revolutions (fit rms " << fmt(m.fit_residual, 3) << " rad)\n";
  }
  if (!ctx.out_path.empty()) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, el, nc);
    write_text(ctx.out_path, csv.str());
  }
  return kSuccess;
}

int cmd_verify(Context& ctx) {
  const KeyValueFile& kv = ctx.config;
  std::vector<VerifyCase> cases;
  if (kv.has("verify_e") || kv.has("verify_eps") || kv.has("verify_kinds")) {
    const auto es = kv.get_double_list("verify_e").value_or(std::vector<double>{0.1, 0.2056, 0.5});
    const auto eps = kv.get_double_list("verify_eps")
                         .value_or(std::vector<double>{1e-6, 1e-5, 1e-4, 1e-3});
    const auto kinds = kv.get_string_list("verify_kinds")
                           .value_or(std::vector<std::string>{"theta", "eta", "mixed"});
    if (es.empty()) throw ValidationError("verify_e", "empty list");
    if (eps.empty()) throw ValidationError("verify_eps", "empty list");
    if (kinds.empty()) throw ValidationError("verify_kinds", "empty list");
    for (double e : es) {
      for (double x : eps) {
        for (const auto& k : kinds) cases.push_back({e, x, parse_perturbation_kind(k)});
      }
    }
  } else {
    cases = default_verify_grid();
  }
  for (const auto& c : cases) {
    if (!(c.e >= 0.0 && c.e < 1.0)) throw ValidationError("verify_e", "need 0 <= e < 1");
    if (!(c.epsilon > 0.0 && 2.0 * std::numbers::pi * c.epsilon * 1.25 < kMaxPerturbativeShift)) {
      throw ValidationError("verify_eps", "epsilon must be > 0 and inside the perturbative regime");
    }
  }

  VerifyOptions opt;
  opt.tolerance = tolerance_from_config(ctx);
  opt.n_orbits = n_orbits_from_config(ctx, 50, 2);
  opt.threads = threads_from_config(ctx);
  if (kv.get_bool("verify_flip_sign").value_or(false)) {
    opt.analytic_override = [](const OrbitElements& el, const NCParams& nc) {
      return -perihelion_shift(el, nc);
    };
  }
  const auto rows = run_verification(cases, opt);

  std::ostream& out = *ctx.out;
  std::ostringstream csv;
  csv << "e,epsilon,kind,analytic_rad_per_rev,measured_rad_per_rev,rel_discrepancy,tolerance,"
         "status,note\n";
  out << std::left << std::setw(8) << "e" << std::setw(9) << "eps" << std::setw(7) << "kind"
      << std::right << std::setw(15) << "analytic" << std::setw(15) << "measured"
      << std::setw(12) << "rel.err" << std::setw(10) << "limit" << "  status\n";
  bool all_ok = true;
  for (const auto& r : rows) {
    const char* status = r.status == VerifyStatus::pass   ? "pass"
                         : r.status == VerifyStatus::fail ? "FAIL"
                                                          : "skipped";
    if (r.status == VerifyStatus::fail) all_ok = false;
    out << std::left << std::setw(8) << fmt(r.test_case.e, 5) << std::setw(9)
        << fmt(r.test_case.epsilon, 3) << std::setw(7) << to_string(r.test_case.kind)
        << std::right << std::setw(15) << fmt(r.analytic, 6) << std::setw(15)
        << fmt(r.measured, 6) << std::setw(12) << fmt(r.rel_discrepancy, 3) << std::setw(10)
        << fmt(r.tolerance, 3) << "  " << status;
    if (!r.note.empty()) out << " (" << r.note << ")";
    out << '\n';
    csv << fmt(r.test_case.e) << ',' << fmt(r.test_case.epsilon) << ','
        << to_string(r.test_case.kind) << ',' << fmt(r.analytic) << ',' << fmt(r.measured) << ','
        << fmt(r.rel_discrepancy) << ',' << fmt(r.tolerance) << ',' << status << ",\""
        << r.note << "\"\n";
  }
  if (!ctx.out_path.empty()) write_text(ctx.out_path, csv.str());
  out << (all_ok ? "all cases pass\n" : "some cases FAILED\n");
  return all_ok ? kSuccess : kFailure;
}

std::vector<ParticleSpec> particles_from_config(const Context& ctx) {
  const auto labels = ctx.config.get_string_list("particles");
  if (!labels) return default_particles(ctx.consts);
  std::vector<ParticleSpec> out;
  for (const auto& item : *labels) {
    if (item == "electron") {
      out.push_back({ctx.consts.electron_mass, "electron"});
    } else if (item == "nucleon") {
      out.push_back({ctx.consts.nucleon_mass, "nucleon"});
    } else if (auto colon = item.find(':'); colon != std::string::npos) {
      auto mass = parse_double(item.substr(colon + 1));
      if (!mass || !(*mass > 0.0)) {
        throw ValidationError("particles", "bad particle mass in '" + item + "'");
      }
      out.push_back({*mass, item.substr(0, colon)});
    } else {
      throw ValidationError("particles",
                            "unknown particle '" + item + "' (use electron, nucleon or label:mass)");
    }
  }
  return out;
}

json report_json(const BoundReport& r) {
  json particles = json::object();
  for (const auto& [label, b] : r.per_particle) {
    particles[label] = {{"theta_bound", b.theta_bound}, {"eta_bound", b.eta_bound},
                        {"p_min", b.p_min}};
  }
  const auto& c = r.inputs_echo.constants;
  const auto& o = r.inputs_echo.observation;
  json echo = {
      {"constants",
       {{"G", c.G}, {"hbar", c.hbar}, {"planck_length", c.planck_length},
        {"solar_mass", c.solar_mass}, {"electron_mass", c.electron_mass},
        {"nucleon_mass", c.nucleon_mass}}},
      {"observation",
       {{"observed_arcsec_per_century", o.observed_arcsec_per_century},
        {"sigma_arcsec_per_century", o.sigma_arcsec_per_century},
        {"gr_rad_per_rev", o.gr_rad_per_rev},
        {"revolutions_per_century", o.revolutions_per_century},
        {"a_m", o.body.a},
        {"e", o.body.e},
        {"mass_kg", o.body.m},
        {"k", o.body.k},
        {"source", o.source}}},
      {"sigma_multiplier", r.inputs_echo.sigma_multiplier},
      {"rounding", to_string(r.inputs_echo.rounding)}};
  return {{"residual_cap", r.residual_cap},
          {"theta_bound_composite", r.theta_bound_composite},
          {"eta_bound_composite", r.eta_bound_composite},
          {"per_particle", particles},
          {"inputs_echo", echo}};
}

int cmd_bounds(Context& ctx) {
  const KeyValueFile& kv = ctx.config;
  const ObservationRecord obs = load_default_observation(ctx);
  const double sigma = kv.get_double("sigma_multiplier").value_or(3.0);
  if (!(sigma > 0.0)) throw ValidationError("sigma_multiplier", "must be > 0");
  const RoundingMode mode =
      parse_rounding_mode(kv.get_string("rounding").value_or("exact"));
  const auto particles = particles_from_config(ctx);
  const BoundReport report = run_pipeline(obs, particles, ctx.consts, sigma, mode);
  write_report_table(*ctx.out, report);
  json doc = report_json(report);
  doc["command"] = "bounds";
  write_json(ctx, doc);
  return kSuccess;
}

int cmd_sweep(Context& ctx) {
  const KeyValueFile& kv = ctx.config;
  SweepSpec spec;
  if (!kv.has("sweep_axis")) throw ValidationError("sweep_axis", "required for sweep");
  spec.axis = parse_sweep_axis(kv.require_string("sweep_axis"));
  if (!kv.has("sweep_from")) throw ValidationError("sweep_from", "required for sweep");
  spec.from = *kv.get_double("sweep_from");
  spec.to = kv.get_double("sweep_to").value_or(spec.from);
  const long count = kv.get_integer("sweep_count").value_or(1);
  if (count < 1 || count > 1000000) throw ValidationError("sweep_count", "must lie in [1, 1e6]");
  spec.count = static_cast<int>(count);
  spec.spacing = parse_sweep_spacing(kv.get_string("sweep_spacing").value_or("linear"));
  spec.base_elements = orbit_from_config(ctx);
  spec.base_nc = nc_from_config(ctx, spec.base_elements.m);
  spec.hold_scaling = kv.get_bool("sweep_hold_scaling").value_or(true);
  spec.measure = kv.get_bool("sweep_measure").value_or(false);
  spec.tolerance = tolerance_from_config(ctx);
  spec.n_orbits = n_orbits_from_config(ctx, 30, 2);
  spec.threads = threads_from_config(ctx);
  spec.validate();

  const auto rows = run_sweep(spec);
  std::ostringstream csv;
  csv << to_string(spec.axis) << ",analytic_rad_per_rev,measured_rad_per_rev,note\n";
  for (const auto& r : rows) {
    csv << fmt(r.value) << ',' << fmt(r.analytic) << ','
        << (r.measured ? fmt(*r.measured) : std::string()) << ",\"" << r.note << "\"\n";
  }
  if (ctx.out_path.empty()) {
    *ctx.out << csv.str();
  } else {
    write_text(ctx.out_path, csv.str());
    *ctx.out << "wrote " << rows.size() << " rows to " << ctx.out_path.string() << '\n';
  }
  return kSuccess;
}

}  // namespace

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("NCORBIT_DATA_DIR"); env && *env) return env;
  return NCORBIT_DEFAULT_DATA_DIR;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perihelion precession on a rotationally invariant noncommutative phase space"};
  app.require_subcommand(1);

  std::string config_path, constants_path, out_path, rounding;
  std::optional<double> tolerance;
  std::vector<std::string> overrides;
  bool no_timestamp = false;

  app.add_option("--config", config_path, "Flat key = value config file");
  app.add_option("--constants", constants_path, "Physical constants override file");
  app.add_option("--out", out_path, "Machine-readable output path");
  app.add_option("--rounding", rounding, "Cap rounding for bounds: paper or exact")
      ->check(CLI::IsMember({"paper", "exact"}));
  app.add_option("--tolerance", tolerance, "Integrator step tolerance");
  app.add_option("--set", overrides, "Override a config key (key=value); repeatable");
  app.add_flag("--no-timestamp", no_timestamp, "Omit generated_at from JSON output");

  for (const char* name : {"shift", "simulate", "verify", "bounds", "sweep"}) {
    static const std::map<std::string, std::string> help = {
        {"shift", "Closed-form perihelion shift, itemised by term"},
        {"simulate", "Integrate the orbit; trajectory CSV to --out"},
        {"verify", "Integrated vs closed-form shift over a case grid"},
        {"bounds", "Upper bounds on the NC parameters from an observation"},
        {"sweep", "Shift over a one-parameter grid (CSV)"}};
    app.add_subcommand(name, help.at(name))->fallthrough();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  try {
    Context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.out = &out;
    ctx.out_path = out_path;
    ctx.timestamp = !no_timestamp;
    ctx.config = config_path.empty() ? KeyValueFile{} : KeyValueFile::load(config_path);
    for (const auto& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ValidationError(item, "--set expects key=value");
      }
      ctx.config.set(item.substr(0, eq), item.substr(eq + 1));
    }
    if (!rounding.empty()) ctx.config.set("rounding", rounding);
    if (tolerance) ctx.config.set("tolerance", fmt(*tolerance));
    ctx.config.reject_unknown(kConfigKeys);
    ctx.consts = PhysicalConstants::load(constants_path.empty() ? data_dir() / "constants.txt"
                                                                : std::filesystem::path(constants_path));

    if (ctx.command == "shift") return cmd_shift(ctx);
    if (ctx.command == "simulate") return cmd_simulate(ctx);
    if (ctx.command == "verify") return cmd_verify(ctx);
    if (ctx.command == "bounds") return cmd_bounds(ctx);
    if (ctx.command == "sweep") return cmd_sweep(ctx);
    return kInvalidInput;
  } catch (const ValidationError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace ncorbit::cli
