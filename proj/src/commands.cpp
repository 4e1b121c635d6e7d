#include "mlrsga/commands.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace mlrsga {

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << contents;
}

ChartSeries residual_series(const SolverComparison& leg) {
  ChartSeries s;
  s.label = leg.solver;
  s.x.reserve(leg.trace.records.size());
  s.y.reserve(leg.trace.records.size());
  for (const TraceRecord& rec : leg.trace.records) {
    s.x.push_back(rec.k);
    s.y.push_back(rec.residual);
  }
  return s;
}

std::vector<ChartSeries> component_series(const SolverComparison& leg) {
  std::vector<ChartSeries> out;
  if (leg.trace.records.empty()) return out;
  const std::size_t players = leg.trace.records.front().block_norms.size();
  for (std::size_t i = 0; i < players; ++i) {
    ChartSeries s;
    s.label = "||x_" + std::to_string(i + 1) + "||";
    for (const TraceRecord& rec : leg.trace.records) {
      s.x.push_back(rec.k);
      s.y.push_back(rec.block_norms[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

SolverComparison run_leg(const BenchmarkGame& bg, const std::string& solver,
                         const JointPoint& w0, const SolverConfig& cfg, int burn_in,
                         SecantState* final_secant) {
  SolverComparison leg;
  leg.solver = solver;
  if (solver == "multilrsga") {
    leg.trace = run_multilrsga(bg.game, w0, cfg, nullptr, final_secant);
  } else if (solver == "gd") {
    leg.trace = run_gradient_descent(bg.game, w0, cfg);
  } else if (solver == "sga") {
    leg.trace = run_exact_sga(bg.game, w0, cfg);
  } else {
    throw std::invalid_argument("run_leg: unknown solver '" + solver + "'");
  }
  leg.oscillation_sign_changes = count_sign_changes(leg.trace.records, burn_in);
  if (leg.trace.status == SolverStatus::kConverged) {
    leg.iterations_to_tolerance = leg.trace.iterations;
  }
  try {
    leg.rate = estimate_linear_rate(leg.trace, burn_in);
  } catch (const std::invalid_argument&) {
    leg.rate = std::nullopt;
  }
  return leg;
}

RunOutputs cmd_run(const RunConfig& cfg) {
  const BenchmarkGame bg = make_benchmark(cfg.game, cfg.game_params);

  JointPoint w0 = [&] {
    if (cfg.start.has_value()) {
      if (static_cast<int>(cfg.start->size()) != bg.game.dimension()) {
        std::ostringstream os;
        os << "run.start: expected " << bg.game.dimension() << " coordinates, got "
           << cfg.start->size();
        throw ConfigError(os.str(), 0, "run.start");
      }
      Vector v(bg.game.dimension());
      for (int i = 0; i < bg.game.dimension(); ++i) v[i] = (*cfg.start)[i];
      return JointPoint(bg.game.layout(), v);
    }
    if (!bg.default_start.has_value()) {
      throw ConfigError("game '" + cfg.game + "' has no default start; set run.start", 0,
                        "run.start");
    }
    return *bg.default_start;
  }();

  constexpr int kBurnIn = 100;
  RunOutputs out;
  out.report.rate_burn_in = kBurnIn;
  out.report.oscillation_burn_in = kBurnIn;

  std::optional<SecantState> final_secant;
  for (const std::string& solver : cfg.solvers) {
    SecantState state{bg.game.layout(), {}, false};
    const bool want_state = cfg.dump_secant && solver == "multilrsga";
    out.report.solvers.push_back(run_leg(bg, solver, w0, cfg.solver_config(solver), kBurnIn,
                                         want_state ? &state : nullptr));
    if (want_state) final_secant = std::move(state);
  }

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);

  if (cfg.emit_csv) {
    for (const SolverComparison& leg : out.report.solvers) {
      std::ostringstream csv;
      write_trace_csv(csv, leg.trace);
      const std::filesystem::path p = dir / ("trace_" + leg.solver + ".csv");
      write_file(p, csv.str());
      out.files.push_back(p);
    }
  }
  if (cfg.emit_json) {
    const std::filesystem::path p = dir / "report.json";
    write_file(p, report_to_json(out.report, cfg, bg.note).dump(2) + "\n");
    out.files.push_back(p);
  }
  if (cfg.emit_svg) {
    std::vector<ChartSeries> residuals;
    for (const SolverComparison& leg : out.report.solvers) {
      residuals.push_back(residual_series(leg));
    }
    std::ostringstream svg;
    write_line_chart_svg(svg, "Residual ||F(w_k)||", "iteration k", "residual", residuals,
                         /*log_y=*/true);
    const std::filesystem::path p = dir / "residuals.svg";
    write_file(p, svg.str());
    out.files.push_back(p);

    for (const SolverComparison& leg : out.report.solvers) {
      std::ostringstream comp;
      write_line_chart_svg(comp, "Component norms (" + leg.solver + ")", "iteration k",
                           "block norm", component_series(leg), /*log_y=*/false);
      const std::filesystem::path cp = dir / ("components_" + leg.solver + ".svg");
      write_file(cp, comp.str());
      out.files.push_back(cp);
    }
  }
  if (final_secant.has_value()) {
    const std::filesystem::path p = dir / "secant_multilrsga.json";
    write_file(p, secant_state_to_json(*final_secant).dump(2) + "\n");
    out.files.push_back(p);
  }
  return out;
}

VerifyResult cmd_verify(const std::string& game, const BenchmarkParams& params, double eta,
                        double tau, int trials, std::uint64_t seed) {
  const BenchmarkGame bg = make_benchmark(game, params);
  if (!bg.known_equilibrium.has_value()) {
    throw ConfigError("game '" + game + "' has no known equilibrium to verify against", 0,
                      "game");
  }
  VerifyResult result;
  result.game = game;
  result.frozen = frozen_map_analysis(bg.game, *bg.known_equilibrium, eta, tau);
  result.lemma_trials = trials;
  for (const SkewBoundTrial& trial : run_skew_bound_trials(trials, seed)) {
    if (trial.within_bound) ++result.lemma_passes;
    if (trial.bound > 0.0) {
      result.lemma_max_ratio = std::max(result.lemma_max_ratio, trial.error / trial.bound);
    }
  }
  return result;
}

void print_verify(std::ostream& os, const VerifyResult& result) {
  const auto yn = [](bool b) { return b ? "yes" : "no"; };
  os << "frozen map at w* (game " << result.game << "):\n";
  os << "  ||DT*||_2            = " << result.frozen.jacobian_norm << "\n";
  os << "  spectral radius      = " << result.frozen.spectral_radius << "\n";
  os << "  contractive (< 1)    = " << yn(result.frozen.contractive) << "\n";
  os << "  L_F estimate         = " << result.frozen.lf_estimate << "\n";
  os << "  eta*tau*(h-1)*L_F    = " << result.frozen.step_condition_lhs << " (< 1: "
     << yn(result.frozen.step_condition_ok) << ")\n";
  os << "skew-error bound trials: " << result.lemma_passes << "/" << result.lemma_trials
     << " within (h-1)*delta, max error/bound ratio " << result.lemma_max_ratio << "\n";
}

std::vector<SweepCell> cmd_sweep(const BenchmarkGame& bg, const std::vector<double>& etas,
                                 const std::vector<double>& taus, const SolverConfig& base,
                                 int jobs, int burn_in) {
  if (etas.empty() || taus.empty()) {
    throw std::invalid_argument("cmd_sweep: eta and tau grids must be nonempty");
  }
  if (!bg.default_start.has_value()) {
    throw std::invalid_argument("cmd_sweep: benchmark has no default start");
  }
  const JointPoint w0 = *bg.default_start;

  std::vector<SweepCell> cells(etas.size() * taus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next.fetch_add(1); idx < cells.size(); idx = next.fetch_add(1)) {
      SolverConfig cfg = base;
      cfg.eta = etas[idx / taus.size()];
      cfg.tau = taus[idx % taus.size()];
      SweepCell cell;
      cell.eta = cfg.eta;
      cell.tau = cfg.tau;
      const SolverTrace trace = run_multilrsga(bg.game, w0, cfg);
      cell.status = trace.status;
      cell.iterations = trace.iterations;
      try {
        cell.q_hat = estimate_linear_rate(trace, burn_in).q_hat;
      } catch (const std::invalid_argument&) {
        cell.q_hat = std::nullopt;
      }
      cells[idx] = std::move(cell);
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return cells;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
  os << "eta,tau,status,iterations,q_hat\n";
  for (const SweepCell& cell : cells) {
    os << format_double(cell.eta) << "," << format_double(cell.tau) << ","
       << to_string(cell.status) << "," << cell.iterations << ","
       << (cell.q_hat.has_value() ? format_double(*cell.q_hat) : "") << "\n";
  }
}

void cmd_list_games(std::ostream& os) {
  for (const std::string& name : benchmark_names()) {
    const BenchmarkGame bg = make_benchmark(name);
    os << name << ": " << bg.note;
    if (bg.known_equilibrium.has_value()) os << " (known equilibrium)";
    os << "\n";
  }
}

}  // namespace mlrsga
