#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlrsga/commands.hpp"
#include "mlrsga/config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash-equilibrium solvers for differentiable games: MultiLRSGA, "
               "gradient descent, exact SGA"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  std::string out_override;
  std::string emit_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  bool dump_secant = false;
  CLI::App* run = app.add_subcommand("run", "Run the solvers described by a config file");
  run->add_option("--config", config_path, "Path to the run configuration")->required();
  run->add_option("--out", out_override, "Override the output directory");
  run->add_option("--emit", emit_override, "Override emitted artifacts (csv,json,svg)");
  run->add_option("--seed", seed_override, "Override the run seed")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_flag("--dump-secant", dump_secant, "Also dump the final secant state to JSON");

  // verify
  std::string verify_game;
  double verify_eta = 1e-3;
  double verify_tau = 1.0;
  int verify_trials = 1000;
  std::uint64_t verify_seed = 20240;
  CLI::App* verify = app.add_subcommand(
      "verify", "Frozen-map diagnostics at the known equilibrium plus skew-bound trials");
  verify->add_option("game", verify_game, "Benchmark game name")->required();
  verify->add_option("--eta", verify_eta, "Stepsize eta");
  verify->add_option("--tau", verify_tau, "Correction weight tau");
  verify->add_option("--trials", verify_trials, "Number of randomized bound trials");
  verify->add_option("--seed", verify_seed, "Seed for the randomized trials");

  // sweep
  std::string sweep_game;
  std::vector<double> sweep_etas;
  std::vector<double> sweep_taus;
  std::string sweep_out = "sweep.csv";
  int sweep_jobs = 1;
  int sweep_max_iter = 50000;
  double sweep_tol = 1e-6;
  std::uint64_t sweep_seed = 12345;
  CLI::App* sweep = app.add_subcommand("sweep", "Grid of MultiLRSGA runs over eta x tau");
  sweep->add_option("game", sweep_game, "Benchmark game name")->required();
  sweep->add_option("--eta", sweep_etas, "Eta grid values")->required()->delimiter(',');
  sweep->add_option("--tau", sweep_taus, "Tau grid values")->required()->delimiter(',');
  sweep->add_option("--out", sweep_out, "Output CSV path");
  sweep->add_option("--jobs", sweep_jobs, "Max parallel cells");
  sweep->add_option("--max-iter", sweep_max_iter, "Iteration budget per cell");
  sweep->add_option("--tol", sweep_tol, "Residual tolerance per cell");
  sweep->add_option("--seed", sweep_seed, "Secant-init seed per cell");

  CLI::App* list = app.add_subcommand("list-games", "List the built-in benchmark games");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run->parsed()) {
      mlrsga::RunConfig cfg = mlrsga::load_run_config(config_path);
      if (!out_override.empty()) cfg.out_dir = out_override;
      if (seed_given) cfg.seed = seed_override;
      if (dump_secant) cfg.dump_secant = true;
      if (!emit_override.empty()) {
        cfg.emit_csv = cfg.emit_json = cfg.emit_svg = false;
        std::stringstream ss(emit_override);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (item == "csv") {
            cfg.emit_csv = true;
          } else if (item == "json") {
            cfg.emit_json = true;
          } else if (item == "svg") {
            cfg.emit_svg = true;
          } else {
            throw mlrsga::ConfigError("--emit: unknown kind '" + item + "'");
          }
        }
      }
      const mlrsga::RunOutputs outputs = mlrsga::cmd_run(cfg);
      for (const auto& leg : outputs.report.solvers) {
        std::cout << leg.solver << ": " << mlrsga::to_string(leg.trace.status) << " after "
                  << leg.trace.iterations << " iterations, final residual "
                  << leg.trace.final_residual() << "\n";
      }
      for (const auto& file : outputs.files) std::cout << "wrote " << file.string() << "\n";
      return kExitOk;
    }
    if (verify->parsed()) {
      const mlrsga::VerifyResult result =
          mlrsga::cmd_verify(verify_game, {}, verify_eta, verify_tau, verify_trials,
                             verify_seed);
      mlrsga::print_verify(std::cout, result);
      return kExitOk;
    }
    if (sweep->parsed()) {
      mlrsga::SolverConfig base;
      base.max_iter = sweep_max_iter;
      base.residual_tol = sweep_tol;
      base.secant_init.seed = sweep_seed;
      const mlrsga::BenchmarkGame bg = mlrsga::make_benchmark(sweep_game);
      const std::vector<mlrsga::SweepCell> cells =
          mlrsga::cmd_sweep(bg, sweep_etas, sweep_taus, base, sweep_jobs);
      std::ofstream out(sweep_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open '" + sweep_out + "' for writing");
      mlrsga::write_sweep_csv(out, cells);
      std::cout << "wrote " << sweep_out << " (" << cells.size() << " cells)\n";
      return kExitOk;
    }
    if (list->parsed()) {
      mlrsga::cmd_list_games(std::cout);
      return kExitOk;
    }
  } catch (const mlrsga::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
