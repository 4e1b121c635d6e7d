#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlrsga/correction.hpp"
#include "mlrsga/game.hpp"
#include "mlrsga/secant.hpp"

namespace mlrsga {

struct SolverConfig {
  double eta = 1e-3;       // main stepsize
  double tau = 1.0;        // weight of the antisymmetric correction
  int max_iter = 50000;
  double residual_tol = 1e-6;
  SecantInitConfig secant_init{};
  // Broyden skip threshold; negative means the per-step default
  // 1e-14 * (1 + ||w||).
  double skip_tol = -1.0;
  int record_every = 1;
  double divergence_tol = 1e12;

  void validate() const;
};

enum class SolverStatus { kConverged, kMaxIter, kDiverged };

std::string to_string(SolverStatus status);

struct TraceRecord {
  int k = 0;
  double residual = 0.0;               // ||F(w_k)||_2
  std::vector<double> block_norms;     // ||x_i^k||_2 per player
  std::optional<double> skew_error;    // ||A_hat_k - A(w*)||_2 when requested
  std::optional<std::vector<double>> secant_errors;  // per player, when requested
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  SolverStatus status = SolverStatus::kMaxIter;
  int iterations = 0;  // k at termination
  std::optional<JointPoint> final_point;

  double final_residual() const { return records.empty() ? 0.0 : records.back().residual; }
};

/// Optional per-record diagnostics against a known equilibrium; only
/// meaningful for benchmark games where w* is available.
struct RunDiagnostics {
  JointPoint w_star;
  bool record_skew_error = true;
  bool record_secant_errors = true;
};

/// Low-rank symplectic iteration w <- w - eta (I - tau A_hat) F(w), with the
/// correction built from Broyden-updated secant state after every step. The
/// gradient is evaluated once per point; the same values feed the step and
/// the secant update. Stops on residual_tol (converged), max_iter, or a
/// residual above divergence_tol (diverged).
SolverTrace run_multilrsga(const Game& g, const JointPoint& w0, const SolverConfig& cfg,
                           const RunDiagnostics* diagnostics = nullptr,
                           SecantState* final_secant = nullptr);

/// Baseline w <- w - eta F(w).
SolverTrace run_gradient_descent(const Game& g, const JointPoint& w0, const SolverConfig& cfg);

/// Symplectic iteration with the exact antisymmetric part,
/// w <- w - eta (I - tau A(w)) F(w).
SolverTrace run_exact_sga(const Game& g, const JointPoint& w0, const SolverConfig& cfg);

/// One update direction (I - tau A_hat) F computed through the assembled
/// matrix, and its blockwise counterpart that never forms the d x d operator.
/// The two agree to rounding; the solver uses the matrix form.
Vector multilrsga_direction_matrix(const SecantState& state, const Vector& f, double tau);
Vector multilrsga_direction_blockwise(const SecantState& state, const Vector& f, double tau);

struct FrozenMapReport {
  double jacobian_norm = 0.0;    // ||DT*||_2 at w*
  double spectral_radius = 0.0;  // max |eig(DT*)|
  double lf_estimate = 0.0;      // Lipschitz bound used for the step condition
  double step_condition_lhs = 0.0;  // eta * tau * (h - 1) * lf_estimate
  bool contractive = false;         // jacobian_norm < 1
  bool step_condition_ok = false;   // step_condition_lhs < 1
};

struct FrozenMapOptions {
  // Sampling of the Lipschitz bound: max ||H(w)||_2 over lf_samples points in
  // a ball of radius lf_radius around w*.
  int lf_samples = 100;
  double lf_radius = 1.0;
  std::uint64_t lf_seed = 2024;
  double fd_step = 1e-5;
};

/// Local diagnostics of the reference dynamics frozen at a stationary point:
/// DT* = I - eta (I - tau A(w*)) H(w*). Throws if ||F(w_star)|| > 1e-8.
/// lf_estimate may be passed in; a non-positive value requests sampling.
FrozenMapReport frozen_map_analysis(const Game& g, const JointPoint& w_star, double eta,
                                    double tau, double lf_estimate = 0.0,
                                    const FrozenMapOptions& opts = {});

struct RateFit {
  double q_hat = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of log residual against iteration index, over records
/// with k >= burn_in and positive residual. q_hat = exp(slope). Throws if
/// fewer than 10 such records exist.
RateFit estimate_linear_rate(const SolverTrace& trace, int burn_in);

}  // namespace mlrsga
