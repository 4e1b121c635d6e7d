#include "mlrsga/secant.hpp"

#include <sstream>

namespace mlrsga {

SecantState init_secant(const Game& g, const JointPoint& w0, const SecantInitConfig& cfg) {
  if (w0.layout != g.layout()) throw std::invalid_argument("init_secant: layout mismatch");
  const BlockLayout& layout = g.layout();
  SecantState state{layout, {}, false};
  state.matrices.reserve(layout.players());

  switch (cfg.strategy) {
    case SecantInit::kZero:
      for (int i = 0; i < layout.players(); ++i) {
        state.matrices.emplace_back(Matrix::Zero(layout.dim(i), layout.total()));
      }
      break;
    case SecantInit::kFiniteDifference:
      for (int i = 0; i < layout.players(); ++i) {
        state.matrices.push_back(player_jacobian(g, w0.values, i,
                                                 HessianMode::kFiniteDifference, cfg.fd_step));
      }
      break;
    case SecantInit::kRandom: {
      if (!(cfg.scale > 0.0)) {
        std::ostringstream os;
        os << "init_secant: random scale must be > 0, got " << cfg.scale;
        throw std::invalid_argument(os.str());
      }
      std::mt19937_64 rng(cfg.seed);
      for (int i = 0; i < layout.players(); ++i) {
        Matrix m(layout.dim(i), layout.total());
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
          for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = uniform_range(rng, -cfg.scale, cfg.scale);
          }
        }
        // Own block from finite differences; only the mixed couplings are random.
        const Matrix jac = player_jacobian(g, w0.values, i, HessianMode::kFiniteDifference,
                                           cfg.fd_step);
        m.middleCols(layout.offset(i), layout.dim(i)) = block_get(jac, layout, i, i);
        state.matrices.push_back(std::move(m));
      }
      break;
    }
  }
  return state;
}

double default_skip_tol(const Vector& w_old) { return 1e-14 * (1.0 + w_old.norm()); }

void broyden_update(SecantState& state, const Vector& s, const Vector& f_old,
                    const Vector& f_new, double skip_tol) {
  const BlockLayout& layout = state.layout;
  if (s.size() != layout.total() || f_old.size() != layout.total() ||
      f_new.size() != layout.total()) {
    throw std::invalid_argument("broyden_update: vector length does not match layout");
  }
  if (skip_tol < 0.0) throw std::invalid_argument("broyden_update: skip_tol must be >= 0");

  if (s.norm() <= skip_tol) {
    state.last_update_skipped = true;
    return;
  }
  state.last_update_skipped = false;
  const double ss = s.squaredNorm();
  for (int i = 0; i < layout.players(); ++i) {
    Matrix& m = state.matrices[i];
    const Vector yi = f_new.segment(layout.offset(i), layout.dim(i)) -
                      f_old.segment(layout.offset(i), layout.dim(i));
    m += ((yi - m * s) / ss) * s.transpose();
  }
}

void broyden_update(SecantState& state, const Game& g, const JointPoint& w_old,
                    const JointPoint& w_new, double skip_tol) {
  broyden_update(state, w_new.values - w_old.values, game_gradient(g, w_old),
                 game_gradient(g, w_new), skip_tol);
}

std::vector<double> secant_error(const SecantState& state, const Game& g,
                                 const JointPoint& w_ref, double fd_step) {
  if (state.layout != g.layout()) throw std::invalid_argument("secant_error: layout mismatch");
  const HessianMode mode =
      g.has_analytic_hessian() ? HessianMode::kAnalytic : HessianMode::kFiniteDifference;
  std::vector<double> errors;
  errors.reserve(state.matrices.size());
  for (int i = 0; i < state.layout.players(); ++i) {
    const Matrix ref = player_jacobian(g, w_ref.values, i, mode, fd_step);
    errors.push_back(spectral_norm(state.matrices[i] - ref));
  }
  return errors;
}

}  // namespace mlrsga
