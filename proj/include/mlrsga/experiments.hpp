#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlrsga/game.hpp"
#include "mlrsga/solvers.hpp"

namespace mlrsga {

struct BenchmarkGame {
  Game game;
  std::string name;
  std::optional<JointPoint> known_equilibrium;
  std::optional<JointPoint> default_start;
  std::string note;
};

/// Three-player benchmark with tanh couplings: player 1 owns (x1, x2),
/// players 2 and 3 own the scalars y and z. Interior equilibrium at the
/// origin; default start (1.0, -0.8, 0.9, -0.7).
BenchmarkGame paper_game();

/// Two scalar players with f_1 = c*x*y, f_2 = -c*x*y. The canonical
/// rotational game: plain gradient descent spirals outward for any fixed
/// stepsize while the corrected dynamics contract.
BenchmarkGame bilinear_game(double coupling = 1.0);

/// Seeded quadratic game: f_i = x_i^T P_i x_i / 2 + x_i^T sum_j B_ij x_j with
/// P_i positive definite (margin below its smallest eigenvalue). The game
/// Hessian is constant and the origin is the equilibrium. A singular draw is
/// regenerated with the next seed and noted in `note`.
BenchmarkGame random_quadratic_game(int players, const std::vector<int>& dims,
                                    std::uint64_t seed, double stability_margin);

/// Names accepted by make_benchmark and the CLI registry.
const std::vector<std::string>& benchmark_names();

struct BenchmarkParams {
  double coupling = 1.0;                // bilinear
  int players = 3;                      // randquad
  std::vector<int> dims = {2, 1, 1};    // randquad
  std::uint64_t seed = 1;               // randquad
  double stability_margin = 0.5;        // randquad
};

BenchmarkGame make_benchmark(const std::string& name, const BenchmarkParams& params = {});

/// Count of sign changes between successive residual differences, the
/// oscillation proxy reported per solver. Records before burn_in (iteration
/// index) are ignored, as are zero differences.
int count_sign_changes(const std::vector<TraceRecord>& records, int burn_in);

struct SolverComparison {
  std::string solver;
  SolverTrace trace;
  std::optional<RateFit> rate;              // absent when the fit has too few points
  std::optional<int> iterations_to_tolerance;  // absent unless converged
  int oscillation_sign_changes = 0;
};

struct ComparisonReport {
  std::vector<SolverComparison> solvers;
  int rate_burn_in = 0;
  int oscillation_burn_in = 0;
};

/// Runs MultiLRSGA and gradient descent (and optionally exact SGA) from the
/// benchmark's default start and assembles traces, rate fits, iterations to
/// tolerance, and oscillation counts. The configs must agree on residual_tol
/// and max_iter. A diverging run is recorded, not fatal.
ComparisonReport compare_solvers(const BenchmarkGame& bg, const SolverConfig& cfg_multi,
                                 const SolverConfig& cfg_gd,
                                 const std::optional<SolverConfig>& cfg_sga = std::nullopt,
                                 int burn_in = 100);

}  // namespace mlrsga
