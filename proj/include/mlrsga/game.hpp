#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlrsga/numerics.hpp"

namespace mlrsga {

using ObjectiveFn = std::function<double(const Vector&)>;
// Partial gradient of player i's objective with respect to its own block;
// takes the full joint vector, returns a vector of length d_i.
using GradientFn = std::function<Vector(const Vector&)>;
// Mixed second-derivative block H_ij(w) of shape d_i x d_j.
using HessianBlockFn = std::function<Matrix(const Vector&)>;

/// Joint strategy vector with its player-block structure.
struct JointPoint {
  JointPoint(BlockLayout layout, Vector values);

  Vector block(int i) const;
  /// Per-player block 2-norms (||x_1||, ..., ||x_h||).
  std::vector<double> block_norms() const;

  BlockLayout layout;
  Vector values;
};

/// An h-player differentiable game: objectives, per-player gradient oracles,
/// and (optionally) analytic mixed second-derivative blocks. Gradients not
/// supplied are synthesized by central finite differences of the objectives.
/// Evaluators must be pure; a Game may be evaluated from several threads.
class Game {
 public:
  Game(BlockLayout layout, std::vector<ObjectiveFn> objectives,
       std::vector<GradientFn> player_gradients = {},
       std::vector<std::vector<HessianBlockFn>> hessian_blocks = {});

  const BlockLayout& layout() const { return layout_; }
  int players() const { return layout_.players(); }
  int dimension() const { return layout_.total(); }

  double objective(int i, const Vector& w) const;
  Vector player_gradient(int i, const Vector& w) const;

  bool has_analytic_hessian() const { return !hessian_blocks_.empty(); }
  Matrix hessian_block(int i, int j, const Vector& w) const;

 private:
  BlockLayout layout_;
  std::vector<ObjectiveFn> objectives_;
  std::vector<GradientFn> gradients_;
  std::vector<std::vector<HessianBlockFn>> hessian_blocks_;
};

/// Stacked game gradient F(w) = (grad_1 f_1; ...; grad_h f_h). Throws if an
/// evaluator returns a non-finite value, naming the player.
Vector game_gradient(const Game& g, const JointPoint& w);
Vector game_gradient(const Game& g, const Vector& w);

enum class HessianMode { kAnalytic, kFiniteDifference };

/// Game Hessian H with block (i, j) = the mixed derivative of player i's
/// gradient with respect to block j.
struct GameHessian {
  BlockLayout layout;
  Matrix full;

  Matrix block(int i, int j) const { return block_get(full, layout, i, j); }
};

/// Assembles H(w). Finite-difference mode builds each row block as the
/// central-difference Jacobian of the player gradient; the per-coordinate
/// step is fd_step * max(1, |w_p|).
GameHessian game_hessian(const Game& g, const JointPoint& w,
                         HessianMode mode = HessianMode::kAnalytic, double fd_step = 1e-5);

/// Row block i of H(w), i.e. the Jacobian of player i's gradient with respect
/// to the whole joint vector (d_i x d).
Matrix player_jacobian(const Game& g, const Vector& w, int i,
                       HessianMode mode = HessianMode::kAnalytic, double fd_step = 1e-5);

/// Entrywise symmetric/antisymmetric split: each (p, q)/(q, p) pair is
/// averaged once and assigned to both positions, so `symmetric` equals its
/// transpose bitwise and `skew` its negated transpose bitwise.
struct SymmetricSkewSplit {
  Matrix symmetric;  // (H + H^T) / 2
  Matrix skew;       // (H - H^T) / 2
};

SymmetricSkewSplit sa_decompose(const Matrix& h);
SymmetricSkewSplit sa_decompose(const GameHessian& h);

struct FirstOrderCheck {
  double residual = 0.0;  // ||F(w)||_2
  bool stationary = false;
  // Minimum eigenvalue of each symmetrized own-block Hessian; filled only
  // when the second-order check is requested.
  std::vector<double> own_block_min_eigenvalues;
};

/// First-order stationarity test ||F(w)|| <= tol; optionally also reports the
/// per-player second-order quantities at w.
FirstOrderCheck check_first_order(const Game& g, const JointPoint& w, double tol,
                                  bool with_second_order = false, double fd_step = 1e-5);

}  // namespace mlrsga
