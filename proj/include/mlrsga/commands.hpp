#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mlrsga/config.hpp"
#include "mlrsga/experiments.hpp"
#include "mlrsga/trace_io.hpp"

namespace mlrsga {

/// One solver leg of a comparison: run, rate fit, oscillation proxy.
SolverComparison run_leg(const BenchmarkGame& bg, const std::string& solver,
                         const JointPoint& w0, const SolverConfig& cfg, int burn_in,
                         SecantState* final_secant = nullptr);

struct RunOutputs {
  ComparisonReport report;
  std::vector<std::filesystem::path> files;
};

/// Executes the configured comparison and writes trace_<solver>.csv,
/// report.json, and the SVG charts into cfg.out_dir, per the emit flags.
/// Solver divergence is recorded in the report, not an error.
RunOutputs cmd_run(const RunConfig& cfg);

struct VerifyResult {
  std::string game;
  FrozenMapReport frozen;
  int lemma_passes = 0;
  int lemma_trials = 0;
  double lemma_max_ratio = 0.0;  // max error/bound across trials
};

/// Frozen-map diagnostics at the game's known equilibrium plus the seeded
/// randomized trials of the skew-correction error bound.
VerifyResult cmd_verify(const std::string& game, const BenchmarkParams& params, double eta,
                        double tau, int trials = 1000, std::uint64_t seed = 20240 );

void print_verify(std::ostream& os, const VerifyResult& result);

struct SweepCell {
  double eta = 0.0;
  double tau = 0.0;
  SolverStatus status = SolverStatus::kMaxIter;
  int iterations = 0;
  std::optional<double> q_hat;
};

/// Grid of independent MultiLRSGA runs over eta x tau, executed on up to
/// `jobs` threads; cells are deterministic and ordered eta-major.
std::vector<SweepCell> cmd_sweep(const BenchmarkGame& bg, const std::vector<double>& etas,
                                 const std::vector<double>& taus, const SolverConfig& base,
                                 int jobs = 1, int burn_in = 100);

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);

void cmd_list_games(std::ostream& os);

}  // namespace mlrsga
