#pragma once

#include <cstdint>
#include <vector>

#include "mlrsga/game.hpp"
#include "mlrsga/numerics.hpp"

namespace mlrsga {

/// Per-player rank-one secant approximations M_i of the Jacobians of the
/// partial gradients, each of shape d_i x d. Owned by one solver run.
struct SecantState {
  BlockLayout layout;
  std::vector<Matrix> matrices;
  bool last_update_skipped = false;
};

enum class SecantInit { kZero, kFiniteDifference, kRandom };

struct SecantInitConfig {
  SecantInit strategy = SecantInit::kRandom;
  std::uint64_t seed = 0;
  // Half-width of the uniform distribution used for the mixed blocks of the
  // random strategy.
  double scale = 0.1;
  double fd_step = 1e-5;
};

/// Initial secant state at w0. Zero: all matrices zero. Finite-difference:
/// M_i is the FD Jacobian of player i's gradient. Random: own blocks from FD,
/// mixed blocks i.i.d. uniform on [-scale, scale] from the seeded generator.
SecantState init_secant(const Game& g, const JointPoint& w0, const SecantInitConfig& cfg);

/// Step-size floor below which a Broyden update is skipped: 1e-14 * (1 + ||w||).
double default_skip_tol(const Vector& w_old);

/// Broyden rank-one update of every player matrix from the step s and the
/// game-gradient values at both endpoints (block i of f_new - f_old is the
/// gradient change y_i of player i). If ||s|| <= skip_tol the state is left
/// unchanged and the skip flag set. After a non-skipped update each M_i
/// satisfies the secant condition M_i s = y_i.
void broyden_update(SecantState& state, const Vector& s, const Vector& f_old,
                    const Vector& f_new, double skip_tol);

/// Convenience overload evaluating the game gradient at both points.
void broyden_update(SecantState& state, const Game& g, const JointPoint& w_old,
                    const JointPoint& w_new, double skip_tol);

/// Per-player spectral-norm errors ||M_i - D(grad_i f_i)(w_ref)||_2 against
/// the reference Jacobians (analytic when available, FD otherwise).
std::vector<double> secant_error(const SecantState& state, const Game& g,
                                 const JointPoint& w_ref, double fd_step = 1e-5);

}  // namespace mlrsga
