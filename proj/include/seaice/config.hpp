#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "seaice/parallel.hpp"
#include "seaice/verification.hpp"

namespace seaice {

// Flat text configuration: one "section.key = value" per line, '#' starts a comment.
// Keys absent from the file keep their defaults.

enum class Scenario { Calm, ConstantWind, Manufactured };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Calm: return "calm";
    case Scenario::ConstantWind: return "constant-wind";
    case Scenario::Manufactured: return "manufactured";
  }
  return "?";
}

inline const char* to_string(GrowthKind k) {
  switch (k) {
    case GrowthKind::Constant: return "constant";
    case GrowthKind::DecayingExponential: return "decaying-exponential";
    case GrowthKind::Table: return "table";
  }
  return "?";
}

struct RunConfig {
  PhysParams phys;
  double coriolis = 0.0;  // rejected unless zero
  Torus plane;
  int nz_atm = 33;
  int nz_ocn = 33;
  double dt = 0.01;
  double t_end = 1.0;
  int n_out = 10;
  double theta = 1.0;  // time weighting; only backward Euler (1) is implemented
  GrowthRate growth;
  Scenario scenario = Scenario::Calm;
  double wind_x = 5.0, wind_y = 0.0;
  double init_h = 1.0, init_a = 0.9;
  double ocean_stress_sign = -1.0;
  double couple_tol = 1e-8;
  int couple_max_iter = 50;
  GmresOptions ice_solver{};
  std::string output_dir = "out";
  int threads = 1;
  std::uint64_t seed = 12345;

  std::vector<std::string> violations() const {
    std::vector<std::string> v = phys.violations();
    for (auto& s : growth.violations()) v.push_back(s);
    if (coriolis != 0.0) v.push_back("phys.coriolis: Coriolis terms are not supported, must be 0");
    if (plane.nx < 4) v.push_back("grid.nx: must be >= 4");
    if (plane.ny < 4) v.push_back("grid.ny: must be >= 4");
    if (!(plane.lx > 0.0)) v.push_back("grid.lx: must be > 0");
    if (!(plane.ly > 0.0)) v.push_back("grid.ly: must be > 0");
    if (nz_atm < 5) v.push_back("grid.nz_atm: must be >= 5");
    if (nz_ocn < 5) v.push_back("grid.nz_ocn: must be >= 5");
    if (!(dt > 0.0)) v.push_back("time.dt: must be > 0");
    if (!(t_end >= dt)) v.push_back("time.t_end: must be >= time.dt");
    if (n_out < 1) v.push_back("time.n_out: must be >= 1");
    if (theta != 1.0) v.push_back("time.theta: only backward Euler (theta = 1) is implemented");
    if (!(init_h > phys.kappa1 && init_h < phys.kappa2))
      v.push_back("init.h: must lie strictly between kappa1 and kappa2");
    if (!(init_a > 0.0 && init_a < 1.0)) v.push_back("init.a: must lie strictly between 0 and 1");
    if (ocean_stress_sign != 1.0 && ocean_stress_sign != -1.0)
      v.push_back("coupling.ocean_stress_sign: must be +1 or -1");
    if (!(couple_tol > 0.0)) v.push_back("coupling.tol: must be > 0");
    if (couple_max_iter < 1) v.push_back("coupling.max_iter: must be >= 1");
    if (!(ice_solver.tol > 0.0)) v.push_back("ice_solver.tol: must be > 0");
    if (ice_solver.restart < 1) v.push_back("ice_solver.restart: must be >= 1");
    if (ice_solver.max_iter < 1) v.push_back("ice_solver.max_iter: must be >= 1");
    if (threads < 1) v.push_back("run.threads: must be >= 1");
    return v;
  }
  void validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Setters throw std::invalid_argument with a short reason; the caller prefixes the key.
inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& s) {
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

inline GrowthKind parse_growth_kind(const std::string& s) {
  if (s == "constant") return GrowthKind::Constant;
  if (s == "decaying-exponential") return GrowthKind::DecayingExponential;
  if (s == "table") return GrowthKind::Table;
  throw std::invalid_argument("unknown growth kind '" + s + "' (constant | decaying-exponential | table)");
}

inline Scenario parse_scenario(const std::string& s) {
  if (s == "calm") return Scenario::Calm;
  if (s == "constant-wind") return Scenario::ConstantWind;
  if (s == "manufactured") return Scenario::Manufactured;
  throw std::invalid_argument("unknown scenario '" + s + "' (calm | constant-wind | manufactured)");
}

// "x0:f0, x1:f1, ..."
inline std::vector<std::pair<double, double>> parse_table(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto c = item.find(':');
    if (c == std::string::npos) throw std::invalid_argument("table entries must look like x:f");
    out.emplace_back(parse_double(trim(item.substr(0, c))), parse_double(trim(item.substr(c + 1))));
  }
  return out;
}

inline std::string format_table(const std::vector<std::pair<double, double>>& t) {
  std::string out;
  for (const auto& [x, f] : t) {
    if (!out.empty()) out += ", ";
    out += format_double(x) + ":" + format_double(f);
  }
  return out;
}

struct ConfigKey {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

inline const std::map<std::string, ConfigKey>& config_keys() {
  static const std::map<std::string, ConfigKey> keys = [] {
    std::map<std::string, ConfigKey> k;
    auto real = [&](const std::string& name, auto member) {
      k[name] = {[member](const RunConfig& c) { return format_double(member(const_cast<RunConfig&>(c))); },
                 [member](RunConfig& c, const std::string& s) { member(c) = parse_double(s); }};
    };
    auto integer = [&](const std::string& name, auto member) {
      k[name] = {[member](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); },
                 [member](RunConfig& c, const std::string& s) {
                   member(c) = parse_int<std::remove_reference_t<decltype(member(c))>>(s);
                 }};
    };
#define SEAICE_REAL(name, expr) real(name, [](RunConfig& c) -> double& { return expr; })
#define SEAICE_INT(name, type, expr) integer(name, [](RunConfig& c) -> type& { return expr; })
    SEAICE_REAL("phys.rho_atm", c.phys.rho_atm);
    SEAICE_REAL("phys.rho_ocn", c.phys.rho_ocn);
    SEAICE_REAL("phys.rho_ice", c.phys.rho_ice);
    SEAICE_REAL("phys.C_atm", c.phys.C_atm);
    SEAICE_REAL("phys.C_ocn", c.phys.C_ocn);
    SEAICE_REAL("phys.theta_atm", c.phys.theta_atm);
    SEAICE_REAL("phys.theta_ocn", c.phys.theta_ocn);
    SEAICE_REAL("phys.p_star", c.phys.p_star);
    SEAICE_REAL("phys.c_star", c.phys.c_star);
    SEAICE_REAL("phys.e_ratio", c.phys.e_ratio);
    SEAICE_REAL("phys.delta_reg", c.phys.delta_reg);
    SEAICE_REAL("phys.d_h", c.phys.d_h);
    SEAICE_REAL("phys.d_a", c.phys.d_a);
    SEAICE_REAL("phys.g_grav", c.phys.g_grav);
    SEAICE_REAL("phys.kappa1", c.phys.kappa1);
    SEAICE_REAL("phys.kappa2", c.phys.kappa2);
    SEAICE_REAL("phys.h_ocn", c.phys.h_ocn);
    SEAICE_REAL("phys.h_atm", c.phys.h_atm);
    SEAICE_REAL("phys.coriolis", c.coriolis);
    SEAICE_INT("grid.nx", int, c.plane.nx);
    SEAICE_INT("grid.ny", int, c.plane.ny);
    SEAICE_REAL("grid.lx", c.plane.lx);
    SEAICE_REAL("grid.ly", c.plane.ly);
    SEAICE_INT("grid.nz_atm", int, c.nz_atm);
    SEAICE_INT("grid.nz_ocn", int, c.nz_ocn);
    SEAICE_REAL("time.dt", c.dt);
    SEAICE_REAL("time.t_end", c.t_end);
    SEAICE_INT("time.n_out", int, c.n_out);
    SEAICE_REAL("time.theta", c.theta);
    SEAICE_REAL("growth.f0", c.growth.f0);
    SEAICE_REAL("growth.h_ref", c.growth.h_ref);
    SEAICE_REAL("scenario.wind_x", c.wind_x);
    SEAICE_REAL("scenario.wind_y", c.wind_y);
    SEAICE_REAL("init.h", c.init_h);
    SEAICE_REAL("init.a", c.init_a);
    SEAICE_REAL("coupling.ocean_stress_sign", c.ocean_stress_sign);
    SEAICE_REAL("coupling.tol", c.couple_tol);
    SEAICE_INT("coupling.max_iter", int, c.couple_max_iter);
    SEAICE_REAL("ice_solver.tol", c.ice_solver.tol);
    SEAICE_INT("ice_solver.restart", int, c.ice_solver.restart);
    SEAICE_INT("ice_solver.max_iter", int, c.ice_solver.max_iter);
    SEAICE_INT("run.threads", int, c.threads);
    SEAICE_INT("run.seed", std::uint64_t, c.seed);
#undef SEAICE_REAL
#undef SEAICE_INT
    k["growth.kind"] = {[](const RunConfig& c) { return std::string(to_string(c.growth.kind)); },
                        [](RunConfig& c, const std::string& s) { c.growth.kind = parse_growth_kind(s); }};
    k["growth.table"] = {[](const RunConfig& c) { return format_table(c.growth.table); },
                         [](RunConfig& c, const std::string& s) { c.growth.table = parse_table(s); }};
    k["scenario.name"] = {[](const RunConfig& c) { return std::string(to_string(c.scenario)); },
                          [](RunConfig& c, const std::string& s) { c.scenario = parse_scenario(s); }};
    k["output.dir"] = {[](const RunConfig& c) { return c.output_dir; },
                       [](RunConfig& c, const std::string& s) { c.output_dir = s; }};
    return k;
  }();
  return keys;
}

}  // namespace detail

/// Parses configuration text. All problems (syntax, unknown keys, types, invariants) are
/// collected and reported together in one ConfigError.
inline RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::vector<std::string> errs;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    const auto& keys = detail::config_keys();
    const auto it = keys.find(key);
    if (it == keys.end()) {
      errs.push_back(key + ": unknown key (line " + std::to_string(lineno) + ")");
      continue;
    }
    if (seen.count(key)) {
      errs.push_back(key + ": duplicate key (lines " + std::to_string(seen[key]) + " and " +
                     std::to_string(lineno) + ")");
      continue;
    }
    seen[key] = lineno;
    try {
      it->second.set(c, val);
    } catch (const std::invalid_argument& e) {
      errs.push_back(key + ": " + e.what());
    }
  }
  if (errs.empty()) errs = c.violations();
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

/// Every key with its value, sorted, one "key = value" line each. Round-trips through
/// parse_config_text.
inline std::string canonical_serialization(const RunConfig& c) {
  std::string out;
  for (const auto& [key, k] : detail::config_keys()) out += key + " = " + k.get(c) + "\n";
  return out;
}

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical_serialization(c)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// From configuration to model objects

inline Model make_model(const RunConfig& c) {
  c.validate();
  Model m = make_model(c.phys, c.plane, c.nz_atm, c.nz_ocn, c.growth);
  m.ocean_stress_sign = c.ocean_stress_sign;
  m.couple_tol = c.couple_tol;
  m.couple_max_iter = c.couple_max_iter;
  m.ice_solver = c.ice_solver;
  return m;
}

inline VerificationSetup verification_setup(const RunConfig& c) {
  c.validate();
  return {c.phys, c.plane, c.nz_atm, c.nz_ocn, c.seed};
}

struct ScenarioSetup {
  State initial;
  Forcing forcing;
};

/// Initial state and forcing of the configured built-in scenario.
inline ScenarioSetup make_scenario(const RunConfig& c, const Model& m) {
  ScenarioSetup s;
  switch (c.scenario) {
    case Scenario::Calm:
    case Scenario::ConstantWind: {
      s.initial = State::zeros(m);
      s.initial.h = Field2D(m.plane(), c.init_h);
      s.initial.a = Field2D(m.plane(), c.init_a);
      if (c.scenario == Scenario::ConstantWind) {
        // a uniform wind is a steady, divergence-free solution of the atmosphere rows
        s.initial.v_atm = VecField3D(Field3D(m.atm, c.wind_x), Field3D(m.atm, c.wind_y));
      }
      break;
    }
    case Scenario::Manufactured: {
      const ManufacturedSolution ms(m);
      s.initial = ms.exact(0.0);
      s.forcing = ms.forcing();
      break;
    }
  }
  return s;
}

inline void apply_runtime(const RunConfig& c) { set_num_threads(c.threads); }

}  // namespace seaice
