#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ncorbit/cli.hpp"

namespace fs = std::filesystem;
using ncorbit::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ncorbit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path file(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

std::string obs_text() {
  std::ifstream in(fs::path(NCORBIT_TEST_DATA_DIR) / "mercury.obs");
  return {std::istreambuf_iterator<char>(in), {}};
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_F(CliTest, ShiftWithZeroNoncommutativity) {
  const Result r = invoke({"shift", "--out", file("s.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(read(file("s.json")));
  EXPECT_EQ(doc["theta_term_rad_per_rev"].get<double>(), 0.0);
  EXPECT_EQ(doc["eta_term_rad_per_rev"].get<double>(), 0.0);
  EXPECT_EQ(doc["total_rad_per_rev"].get<double>(), 0.0);
  EXPECT_EQ(doc["total_arcsec_per_century"].get<double>(), 0.0);
  EXPECT_NE(r.out.find("theta"), std::string::npos);
  EXPECT_EQ(r.out.find("-0"), std::string::npos);
}

TEST_F(CliTest, ShiftAtThetaBoundSaturatesCap) {
  const Result r = invoke({"shift", "--set", "theta_bound=2.3e-57", "--out",
                           file("s.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(read(file("s.json")));
  EXPECT_LT(rel(doc["total_rad_per_rev"].get<double>(), 2.0 * M_PI * 1e-11), 0.05);
}

TEST_F(CliTest, ShiftRejectsUnboundEccentricity) {
  const Result r = invoke({"shift", "--set", "e=1.2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("e:"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownConfigKeyIsFatal) {
  const fs::path cfg = write("run.cfg", "a_m = 1\nflavour = strange\n");
  const Result r = invoke({"shift", "--config", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("flavour"), std::string::npos) << r.err;
  const Result s = invoke({"shift", "--set", "wibble=3"});
  EXPECT_EQ(s.code, 2);
  EXPECT_NE(s.err.find("wibble"), std::string::npos) << s.err;
}

TEST_F(CliTest, ValidationFailuresExitTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"shift", "--set", "a_m=-1"}).code, 2);
  EXPECT_EQ(invoke({"shift", "--set", "theta_sq=-1"}).code, 2);
  EXPECT_EQ(invoke({"shift", "--set", "theta_sq=1", "--set", "theta_bound=1"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--tolerance", "0.5"}).code, 2);
  EXPECT_EQ(invoke({"bounds", "--rounding", "approx"}).code, 2);
  EXPECT_EQ(invoke({"bounds", "--set", "sigma_multiplier=0"}).code, 2);
  EXPECT_EQ(invoke({"sweep"}).code, 2);
  EXPECT_EQ(invoke({"verify", "--set", "verify_e=1.5"}).code, 2);
  EXPECT_EQ(invoke({"shift", "--constants", file("missing.txt").string()}).code, 2);
}

TEST_F(CliTest, ConstantsOverrideFile) {
  const fs::path c = write("c.txt", "hbar = 2.109143634e-34\n");
  ASSERT_EQ(invoke({"bounds", "--no-timestamp", "--out", file("a.json").string()}).code, 0);
  ASSERT_EQ(invoke({"bounds", "--no-timestamp", "--constants", c.string(), "--out",
                    file("b.json").string()})
                .code,
            0);
  const auto a = nlohmann::json::parse(read(file("a.json")));
  const auto b = nlohmann::json::parse(read(file("b.json")));
  EXPECT_NEAR(b["theta_bound_composite"].get<double>() / a["theta_bound_composite"].get<double>(),
              2.0, 1e-12);
  EXPECT_EQ(b["inputs_echo"]["constants"]["hbar"].get<double>(), 2.109143634e-34);
}

TEST_F(CliTest, BoundsPaperModeReproducesPublishedNumbers) {
  const Result r = invoke({"bounds", "--rounding", "paper", "--out", file("b.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(read(file("b.json")));
  for (const char* key : {"residual_cap", "theta_bound_composite", "eta_bound_composite",
                          "per_particle", "inputs_echo", "generated_at"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc["residual_cap"].get<double>(), 2.0 * M_PI * 1e-11);
  EXPECT_LT(rel(doc["theta_bound_composite"].get<double>(), 2.3e-57), 0.15);
  EXPECT_LT(rel(doc["eta_bound_composite"].get<double>(), 1.8e-22), 0.15);
  const auto& e = doc["per_particle"]["electron"];
  EXPECT_LT(rel(e["theta_bound"].get<double>(), 8.3e-4), 0.15);
  EXPECT_LT(rel(e["eta_bound"].get<double>(), 5.1e-76), 0.15);
  EXPECT_LT(rel(e["p_min"].get<double>(), 2.5e-38), 0.15);
  EXPECT_LT(rel(doc["per_particle"]["nucleon"]["eta_bound"].get<double>(), 9.3e-73), 0.15);
  EXPECT_EQ(doc["inputs_echo"]["rounding"], "paper");
  EXPECT_NE(r.out.find("electron"), std::string::npos);
}

TEST_F(CliTest, BoundsMissingMassKey) {
  std::string text = obs_text();
  text.erase(text.find("mass_kg"));
  const fs::path obs = write("m.obs", text);
  const Result r = invoke({"bounds", "--set", "observation=" + obs.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("mass_kg"), std::string::npos) << r.err;
}

TEST_F(CliTest, BoundsMalformedLineIsLocated) {
  std::string text = obs_text();
  text += "garbage line\n";
  const fs::path obs = write("g.obs", text);
  const Result r = invoke({"bounds", "--set", "observation=" + obs.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("g.obs:"), std::string::npos) << r.err;
}

TEST_F(CliTest, BoundsWithZeroSigmaUseCentralResidual) {
  std::string text = obs_text();
  text.replace(text.find("0.0009"), 6, "0");
  const fs::path obs = write("z.obs", text);
  const Result r = invoke({"bounds", "--set", "observation=" + obs.string(), "--out",
                           file("z.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(read(file("z.json")));
  const double to_rad = 2.0 * M_PI / (360.0 * 3600.0) / 415.2;
  const double central = std::abs(42.9779 * to_rad - 5.018656564997852e-7);
  EXPECT_LE(rel(doc["residual_cap"].get<double>(), central), 1e-12);
  const double a = 5.7909e10, e = 0.20563, m = 3.3011e23, k = 6.67430e-11 * 1.98892e30;
  const double theta_sq = central * 8.0 * a * a * a * std::pow(1 - e * e, 3) /
                          (M_PI * k * m * m * (4 + e * e));
  EXPECT_LE(rel(doc["theta_bound_composite"].get<double>(), 1.054571817e-34 * std::sqrt(theta_sq)),
            1e-12);
}

TEST_F(CliTest, MachineOutputIsDeterministic) {
  for (const std::string cmd : {"bounds", "shift"}) {
    ASSERT_EQ(invoke({cmd, "--no-timestamp", "--out", file("1.json").string()}).code, 0);
    ASSERT_EQ(invoke({cmd, "--no-timestamp", "--out", file("2.json").string()}).code, 0);
    const std::string one = read(file("1.json"));
    EXPECT_EQ(one, read(file("2.json"))) << cmd;
    EXPECT_EQ(one.find("generated_at"), std::string::npos);
  }
}

TEST_F(CliTest, SimulateWritesTrajectory) {
  const Result r = invoke({"simulate", "--set", "a_m=1", "--set", "e=0.3", "--set", "mass_kg=1",
                           "--set", "k=1", "--set", "n_orbits=3", "--out",
                           file("t.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read(file("t.csv"));
  EXPECT_EQ(csv.rfind("t,x,y,z,px,py,pz,H,Lz\n", 0), 0u);
  EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 50);
}

TEST_F(CliTest, VerifySmallGridPasses) {
  const Result r = invoke({"verify", "--set", "verify_e=0.2056", "--set", "verify_eps=1e-4",
                           "--set", "n_orbits=20", "--out", file("v.csv").string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const std::string csv = read(file("v.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_NE(csv.find("pass"), std::string::npos);
}

TEST_F(CliTest, VerifySkipsCircularOrbit) {
  const Result r = invoke({"verify", "--set", "verify_e=0,0.3", "--set", "verify_eps=1e-4",
                           "--set", "verify_kinds=theta", "--set", "n_orbits=10"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("skip"), std::string::npos) << r.out;
}

TEST_F(CliTest, VerifyWithFlippedSignFails) {
  const Result r = invoke({"verify", "--set", "verify_e=0.3", "--set", "verify_eps=1e-4",
                           "--set", "verify_kinds=theta", "--set", "n_orbits=10", "--set",
                           "verify_flip_sign=true"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST_F(CliTest, SweepSinglePointMatchesShift) {
  const std::vector<std::string> common = {"--set", "scaling_A=1e-3", "--set", "scaling_B=1e-4",
                                           "--set", "a_m=1", "--set", "e=0.3", "--set",
                                           "mass_kg=1", "--set", "k=1"};
  std::vector<std::string> shift = {"shift", "--out", file("s.json").string()};
  shift.insert(shift.end(), common.begin(), common.end());
  ASSERT_EQ(invoke(shift).code, 0);
  const double total =
      nlohmann::json::parse(read(file("s.json")))["total_rad_per_rev"].get<double>();

  std::vector<std::string> sweep = {"sweep", "--set", "sweep_axis=e", "--set", "sweep_from=0.3"};
  sweep.insert(sweep.end(), common.begin(), common.end());
  const Result r = invoke(sweep);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(header, "e,analytic_rad_per_rev,measured_rad_per_rev,note");
  const auto c1 = row.find(','), c2 = row.find(',', c1 + 1);
  EXPECT_EQ(std::stod(row.substr(c1 + 1, c2 - c1 - 1)), total);
}

namespace {

std::vector<double> sweep_column(const std::string& csv, int col) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::size_t start = 0;
    for (int i = 0; i < col; ++i) start = line.find(',', start) + 1;
    out.push_back(std::stod(line.substr(start, line.find(',', start) - start)));
  }
  return out;
}

}  // namespace

TEST_F(CliTest, SweepMassAxisIsFlat) {
  const Result r = invoke({"sweep", "--set", "sweep_axis=m", "--set", "sweep_from=1e-3", "--set",
                           "sweep_to=1e3", "--set", "sweep_count=7", "--set",
                           "sweep_spacing=log", "--set", "scaling_A=1e-3", "--set", "a_m=1",
                           "--set", "e=0.3", "--set", "mass_kg=1", "--set", "k=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto col = sweep_column(r.out, 1);
  ASSERT_EQ(col.size(), 7u);
  for (double v : col) EXPECT_LT(rel(v, col[0]), 1e-3);
}

TEST_F(CliTest, SweepEccentricityAxisIsMonotone) {
  const Result r = invoke({"sweep", "--set", "sweep_axis=e", "--set", "sweep_from=0", "--set",
                           "sweep_to=0.9", "--set", "sweep_count=19", "--set", "theta_sq=1e-3",
                           "--set", "a_m=1", "--set", "mass_kg=1", "--set", "k=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto col = sweep_column(r.out, 1);
  ASSERT_EQ(col.size(), 19u);
  for (std::size_t i = 1; i < col.size(); ++i) EXPECT_GT(col[i], col[i - 1]);
}

TEST_F(CliTest, SweepOutputIndependentOfThreads) {
  const std::vector<std::string> base = {
      "sweep",         "--set", "sweep_axis=e",   "--set", "sweep_from=0.1", "--set",
      "sweep_to=0.5",  "--set", "sweep_count=4",  "--set", "sweep_measure=true", "--set",
      "n_orbits=4",    "--set", "theta_sq=1e-5",  "--set", "a_m=1",          "--set",
      "mass_kg=1",     "--set", "k=1"};
  auto one = base, four = base;
  one.insert(one.end(), {"--set", "threads=1"});
  four.insert(four.end(), {"--set", "threads=4"});
  const Result a = invoke(one), b = invoke(four);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SweepRejectsEmptyGrid) {
  EXPECT_EQ(invoke({"sweep", "--set", "sweep_axis=e", "--set", "sweep_from=0.1", "--set",
                    "sweep_count=0"})
                .code,
            2);
  EXPECT_EQ(invoke({"sweep", "--set", "sweep_axis=e", "--set", "sweep_from=0.1", "--set",
                    "sweep_to=1.5", "--set", "sweep_count=3"})
                .code,
            2);
}
