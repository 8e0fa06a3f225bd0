#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "seaice/seaice.hpp"

using namespace seaice;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seaice_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kSmall = "grid.nx = 8\ngrid.ny = 8\ngrid.nz_atm = 9\ngrid.nz_ocn = 9\n";

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig c = parse_config_text("# nothing but a comment\n\n");
  const RunConfig d;
  EXPECT_EQ(canonical_serialization(c), canonical_serialization(d));
  EXPECT_EQ(c.phys.e_ratio, 2.0);
  EXPECT_EQ(c.phys.p_star, 27500.0);
  EXPECT_EQ(c.growth.kind, GrowthKind::DecayingExponential);
  EXPECT_EQ(c.scenario, Scenario::Calm);
}

TEST(Config, ParsesValuesAndInlineComments) {
  const RunConfig c = parse_config_text(
      "phys.p_star = 30000  # stronger ice\n"
      "time.dt = 0.05\n"
      "growth.kind = table\n"
      "growth.table = 0:-0.1, 1:0.2, 2:0\n"
      "scenario.name = constant-wind\n"
      "output.dir = results/a\n");
  EXPECT_EQ(c.phys.p_star, 30000.0);
  EXPECT_EQ(c.dt, 0.05);
  ASSERT_EQ(c.growth.table.size(), 3u);
  EXPECT_EQ(c.growth.table[1], (std::pair<double, double>{1.0, 0.2}));
  EXPECT_EQ(c.scenario, Scenario::ConstantWind);
  EXPECT_EQ(c.output_dir, "results/a");
}

TEST(Config, RejectsInvalidPhysicalParameters) {
  EXPECT_TRUE(mentions(violations_of("phys.kappa1 = 0\n"), "phys.kappa1"));
  EXPECT_TRUE(mentions(violations_of("phys.e_ratio = 0.5\n"), "phys.e_ratio"));
  EXPECT_TRUE(mentions(violations_of("phys.delta_reg = 0\n"), "phys.delta_reg"));
  EXPECT_TRUE(mentions(violations_of("phys.kappa1 = 2.5\nphys.kappa2 = 2\n"), "phys.kappa2"));
  EXPECT_TRUE(mentions(violations_of("phys.coriolis = 1e-4\n"), "phys.coriolis"));
  EXPECT_TRUE(mentions(violations_of("time.theta = 0.5\n"), "time.theta"));
  EXPECT_TRUE(mentions(violations_of("init.h = 5\n"), "init.h"));
  EXPECT_TRUE(mentions(violations_of("coupling.ocean_stress_sign = 0.5\n"), "coupling.ocean_stress_sign"));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_TRUE(mentions(violations_of("phys.nonsense = 1\n"), "unknown key"));
  EXPECT_TRUE(mentions(violations_of("time.dt = fast\n"), "time.dt"));
  EXPECT_TRUE(mentions(violations_of("grid.nx = 8.5\n"), "grid.nx"));
  EXPECT_TRUE(mentions(violations_of("time.dt = 0.1\ntime.dt = 0.2\n"), "duplicate"));
  EXPECT_TRUE(mentions(violations_of("just some words\n"), "line 1"));
  EXPECT_TRUE(mentions(violations_of("growth.kind = cubic\n"), "growth.kind"));
  EXPECT_TRUE(mentions(violations_of("growth.table = 1;2\n"), "growth.table"));
}

TEST(Config, ReportsAllProblemsTogether) {
  const auto v = violations_of("a.b = 1\nc.d = 2\ntime.dt = x\n");
  EXPECT_EQ(v.size(), 3u);
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(parse_config("/nonexistent/dir/run.cfg"), ConfigError);
}

TEST(Config, CanonicalSerializationRoundTrips) {
  RunConfig c;
  c.phys.theta_atm = 0.123456789012345678;
  c.plane.lx = 3.0;
  c.growth = {GrowthKind::Table, 0.0, 1.0, {{0.0, -0.25}, {1.5, 0.125}}};
  c.scenario = Scenario::Manufactured;
  c.seed = 987654321;
  const std::string text = canonical_serialization(c);
  const RunConfig back = parse_config_text(text);
  EXPECT_EQ(canonical_serialization(back), text);
  EXPECT_EQ(back.phys.theta_atm, c.phys.theta_atm);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, HashIsStableAndSensitive) {
  RunConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.dt = 0.02;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, BuildsModelAndScenarios) {
  RunConfig c = parse_config_text(std::string(kSmall) + "scenario.name = constant-wind\nscenario.wind_x = 4\n"
                                                        "coupling.ocean_stress_sign = 1\n");
  const Model m = make_model(c);
  EXPECT_EQ(m.plane().nx, 8);
  EXPECT_EQ(m.atm.nz, 9);
  EXPECT_EQ(m.atm.bc_lo, Boundary::Neumann);
  EXPECT_EQ(m.ocn.bc_hi, Boundary::Dirichlet);
  EXPECT_EQ(m.ocean_stress_sign, 1.0);
  const ScenarioSetup s = make_scenario(c, m);
  EXPECT_EQ(max_abs_diff(s.initial.v_atm.x, Field3D(m.atm, 4.0)), 0.0);
  EXPECT_EQ(max_abs_diff(s.initial.h, Field2D(m.plane(), c.init_h)), 0.0);

  c.scenario = Scenario::Manufactured;
  const ScenarioSetup ms = make_scenario(c, m);
  ASSERT_TRUE(static_cast<bool>(ms.forcing.f_ice));
  EXPECT_NO_THROW(check_manufactured_state(m, ms.initial));
}

TEST(Config, ShippedConfigurationsParse) {
  const fs::path dir = fs::path(SEAICE_SOURCE_DIR) / "configs";
  for (const char* name : {"default.cfg", "calm.cfg", "constant_wind.cfg", "strong_melt.cfg"})
    EXPECT_NO_THROW(parse_config((dir / name).string())) << name;
  EXPECT_THROW(parse_config((dir / "invalid_kappa.cfg").string()), ConfigError);
}

TEST(Snapshot, RoundTripIsBitExact) {
  const RunConfig c = parse_config_text(kSmall);
  const Model m = make_model(c);
  std::mt19937_64 rng(1);
  State s = State::zeros(m);
  s.v_atm = {random_grid(m.atm, rng), random_grid(m.atm, rng)};
  s.v_ocn = {random_grid(m.ocn, rng), random_grid(m.ocn, rng)};
  s.u_ice = {random_grid(m.plane(), rng), random_grid(m.plane(), rng)};
  s.h = random_grid(m.plane(), rng);
  s.a = random_grid(m.plane(), rng);
  s.t = 0.1 + 0.2;
  const fs::path dir = scratch_dir("roundtrip");
  write_snapshot(s, m, dir, config_hash(c));
  const SnapshotRead r = read_snapshot(dir, m, config_hash(c));
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.state.t, s.t);
  EXPECT_EQ(max_abs_diff(r.state, s), 0.0);
  EXPECT_EQ(fs::file_size(dir / "h.bin"), 8u * 64u);
  fs::remove_all(dir);
}

TEST(Snapshot, DetectsTruncationVersionAndHash) {
  const RunConfig c = parse_config_text(kSmall);
  const Model m = make_model(c);
  const fs::path dir = scratch_dir("damaged");
  write_snapshot(calm_state(m), m, dir, config_hash(c));

  const SnapshotRead other = read_snapshot(dir, m, "0123456789abcdef");
  ASSERT_EQ(other.warnings.size(), 1u);

  fs::resize_file(dir / "a.bin", 8u * 63u);
  EXPECT_THROW(read_snapshot(dir, m), DimensionError);

  std::string meta;
  {
    std::ifstream f(dir / "meta.txt");
    std::stringstream ss;
    ss << f.rdbuf();
    meta = ss.str();
  }
  meta.replace(meta.find("format_version = 1"), 18, "format_version = 2");
  std::ofstream(dir / "meta.txt") << meta;
  EXPECT_THROW(read_snapshot(dir, m), FormatError);
  fs::remove_all(dir);
}

TEST(Snapshot, RejectsMismatchedGrid) {
  const RunConfig c = parse_config_text(kSmall);
  const Model m = make_model(c);
  const fs::path dir = scratch_dir("grid");
  write_snapshot(calm_state(m), m, dir, config_hash(c));
  const Model bigger = make_model(parse_config_text("grid.nx = 16\ngrid.ny = 8\ngrid.nz_atm = 9\ngrid.nz_ocn = 9\n"));
  EXPECT_THROW(read_snapshot(dir, bigger), DimensionError);
  fs::remove_all(dir);
}
