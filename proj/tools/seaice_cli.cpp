#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "seaice/seaice.hpp"

namespace fs = std::filesystem;
using namespace seaice;

namespace {

constexpr int kOk = 0;
constexpr int kPhysical = 1;
constexpr int kUsage = 2;

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06d", step);
  return buf;
}

nlohmann::json to_json(const LedgerEntry& e) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, v] : e.metrics) metrics[k] = v;
  return {{"id", e.id},           {"suite", e.suite},     {"name", e.name},
          {"passed", e.passed},   {"detail", e.detail},   {"metrics", metrics},
          {"seconds", e.seconds}};
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const Model m = make_model(cfg);
  const ScenarioSetup sc = make_scenario(cfg, m);
  const std::string hash = config_hash(cfg);
  const fs::path out = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
  fs::create_directories(out);
  {
    std::ofstream f(out / "config.cfg");
    f << canonical_serialization(cfg);
  }
  const RunResult r = run(m, sc.initial, sc.forcing, cfg.dt, cfg.t_end, cfg.n_out,
                          [&](const State& s, int step) {
                            write_snapshot(s, m, out / snapshot_name(step), hash);
                          });
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& rep : r.reports)
    steps.push_back({{"picard_iters", rep.picard_iters},
                     {"coupling_residual", rep.coupling_residual},
                     {"constraint_margin", rep.constraint_margin},
                     {"solver_residuals", rep.solver_residuals}});
  const nlohmann::json report = {{"cause", to_string(r.cause)},
                                 {"message", r.message},
                                 {"steps", r.steps},
                                 {"final_time", r.final_state.t},
                                 {"config_hash", hash},
                                 {"step_reports", steps}};
  std::ofstream(out / "run_report.json") << report.dump(2) << "\n";
  std::cout << r.message << " (t = " << r.final_state.t << ", " << r.steps << " steps)\n";
  return r.cause == Termination::ReachedEnd ? kOk : kPhysical;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, const std::string& ledger_path) {
  const auto entries = suite_all(verification_setup(cfg), suite);
  nlohmann::json ledger = nlohmann::json::array();
  bool all = true;
  std::ostringstream text;
  for (const auto& e : entries) {
    all = all && e.passed;
    ledger.push_back(to_json(e));
    char head[64];
    std::snprintf(head, sizeof head, "[%s] %2d %-15s", e.passed ? "PASS" : "FAIL", e.id, e.suite.c_str());
    text << head << e.detail << "  (" << format_sci(e.seconds, 2) << " s)\n";
  }
  text << (all ? "all checks passed\n" : "some checks failed\n");
  std::cout << text.str();
  const fs::path json_path = ledger_path.empty() ? fs::path(cfg.output_dir) / "ledger.json" : fs::path(ledger_path);
  if (json_path.has_parent_path()) fs::create_directories(json_path.parent_path());
  std::ofstream(json_path) << nlohmann::json{{"config_hash", config_hash(cfg)}, {"entries", ledger}}.dump(2)
                           << "\n";
  fs::path txt = json_path;
  txt.replace_extension(".txt");
  std::ofstream(txt) << text.str();
  return all ? kOk : kPhysical;
}

int cmd_ellipticity(const RunConfig& cfg, const std::string& state_dir, int n_xi, int n_eta) {
  const Model m = make_model(cfg);
  const SnapshotRead snap = read_snapshot(state_dir, m, config_hash(cfg));
  for (const auto& w : snap.warnings) std::cerr << "warning: " << w << "\n";
  const State& s = snap.state;
  try {
    const auto res =
        ellipticity_certificate(linearize_hibler(m.phys, m.plane(), s.u_ice, s.h, s.a), n_xi, n_eta);
    const auto& w = res.witness;
    std::cout << "c_min = " << format_sci(res.c_min, 6) << " at grid point (" << w.i << ", " << w.j
              << "), xi angle " << w.xi_angle << ", alpha " << w.alpha << ", beta " << w.beta << "\n";
    return kOk;
  } catch (const CertificateError& e) {
    std::cout << "certificate failed: " << e.what() << "\n";
    return kPhysical;
  }
}

int cmd_convergence(const RunConfig& cfg, const std::string& target) {
  const VerificationSetup s = verification_setup(cfg);
  const ConvergenceReport r = target == "vertical" ? vertical_convergence(s) : temporal_convergence(s);
  std::cout << (target == "vertical" ? "dz" : "dt") << "            error\n";
  for (std::size_t i = 0; i < r.errors.size(); ++i)
    std::cout << format_sci(r.resolutions[i], 4) << "    " << format_sci(r.errors[i], 4) << "\n";
  std::cout << "fitted order " << r.fitted_order << ", r^2 " << r.r2_fit
            << (r.monotone ? "" : ", errors not monotone") << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled atmosphere, ocean and sea-ice solver on a periodic layer domain"};
  app.require_subcommand(1);

  std::string config, out_dir, suite = "all", ledger, state_dir, target;
  int n_xi = 64, n_eta = 64;

  auto* sim = app.add_subcommand("simulate", "Run the configured scenario and write snapshots");
  sim->add_option("--config", config, "Configuration file")->required();
  sim->add_option("--out", out_dir, "Output directory (default: output.dir)");

  auto* ver = app.add_subcommand("verify", "Run the verification checks and write a ledger");
  ver->add_option("--suite", suite, "Check name or 'all'");
  ver->add_option("--config", config, "Configuration file")->required();
  ver->add_option("--ledger", ledger, "Ledger JSON path (default: <output.dir>/ledger.json)");

  auto* ell = app.add_subcommand("ellipticity", "Ellipticity certificate of a stored ice state");
  ell->add_option("--config", config, "Configuration file")->required();
  ell->add_option("--state", state_dir, "Snapshot directory")->required();
  ell->add_option("--n-xi", n_xi, "Directions of xi");
  ell->add_option("--n-eta", n_eta, "Samples of eta");

  auto* conv = app.add_subcommand("convergence", "Refinement study with fitted order");
  conv->add_option("--target", target, "vertical or temporal")
      ->required()
      ->check(CLI::IsMember({"vertical", "temporal"}));
  conv->add_option("--config", config, "Configuration file")->required();

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    const RunConfig cfg = parse_config(config);
    apply_runtime(cfg);
    if (*sim) return cmd_simulate(cfg, out_dir);
    if (*ver) return cmd_verify(cfg, suite, ledger);
    if (*ell) return cmd_ellipticity(cfg, state_dir, n_xi, n_eta);
    if (*conv) return cmd_convergence(cfg, target);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return kUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPhysical;
  }
  return kUsage;
}
