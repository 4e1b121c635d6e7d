#pragma once

#include "mlrsga/game.hpp"
#include "mlrsga/numerics.hpp"
#include "mlrsga/secant.hpp"

namespace mlrsga {

/// Block antisymmetric d x d operator. Antisymmetry is structural: upper
/// blocks are computed once, the lower triangle is their negated transpose,
/// and the per-layout diagonal blocks are zero. full() + full()^T is the zero
/// matrix bitwise.
class SkewCorrection {
 public:
  using BlockProvider = std::function<Matrix(int i, int j)>;  // upper blocks, i < j

  SkewCorrection(BlockLayout layout, const BlockProvider& upper_block);

  const BlockLayout& layout() const { return layout_; }
  const Matrix& full() const { return full_; }
  Matrix block(int i, int j) const { return block_get(full_, layout_, i, j); }

 private:
  BlockLayout layout_;
  Matrix full_;
};

/// Approximate antisymmetric correction from secant state:
/// block (i, j) = ([M_i]_j - [M_j]_i^T) / 2 for i < j.
SkewCorrection build_skew_correction(const SecantState& state);

/// Exact antisymmetric part of the game Hessian at w:
/// block (i, j) = (H_ij(w) - H_ji(w)^T) / 2. Uses analytic mixed blocks when
/// available, finite differences otherwise.
SkewCorrection exact_skew(const Game& g, const JointPoint& w, double fd_step = 1e-5);

/// Spectral-norm distance between two corrections on the same layout.
double skew_error(const SkewCorrection& approx, const SkewCorrection& exact);

/// One randomized trial of the (h-1)*delta error bound: perturb exact
/// Jacobians by at most delta per player, build both corrections, compare.
struct SkewBoundTrial {
  double error = 0.0;        // ||A_hat - A||_2
  double max_player_error = 0.0;  // max_i ||M_i - J_i||_2
  double bound = 0.0;        // (h - 1) * max_player_error
  bool within_bound = false;
};

/// Runs seeded randomized trials of the skew-correction error bound across
/// player counts 2..5 and block sizes 1..3. Returns one entry per trial.
std::vector<SkewBoundTrial> run_skew_bound_trials(int trials, std::uint64_t seed,
                                                  double slack = 1e-12);

}  // namespace mlrsga
