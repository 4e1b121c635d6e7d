#include "mlrsga/correction.hpp"

#include <sstream>

namespace mlrsga {

SkewCorrection::SkewCorrection(BlockLayout layout, const BlockProvider& upper_block)
    : layout_(std::move(layout)), full_(Matrix::Zero(layout_.total(), layout_.total())) {
  for (int i = 0; i < layout_.players(); ++i) {
    for (int j = i + 1; j < layout_.players(); ++j) {
      Matrix blk = upper_block(i, j);
      if (blk.rows() != layout_.dim(i) || blk.cols() != layout_.dim(j)) {
        std::ostringstream os;
        os << "SkewCorrection: block (" << i << ", " << j << ") has shape " << blk.rows() << "x"
           << blk.cols() << ", expected " << layout_.dim(i) << "x" << layout_.dim(j);
        throw std::invalid_argument(os.str());
      }
      full_.block(layout_.offset(i), layout_.offset(j), blk.rows(), blk.cols()) = blk;
      full_.block(layout_.offset(j), layout_.offset(i), blk.cols(), blk.rows()) =
          -blk.transpose();
    }
  }
}

SkewCorrection build_skew_correction(const SecantState& state) {
  const BlockLayout& layout = state.layout;
  return SkewCorrection(layout, [&](int i, int j) {
    const Matrix mi_j = block_get(state.matrices[i], layout, i, j);
    const Matrix mj_i = block_get(state.matrices[j], layout, j, i);
    return Matrix(0.5 * (mi_j - mj_i.transpose()));
  });
}

SkewCorrection exact_skew(const Game& g, const JointPoint& w, double fd_step) {
  if (w.layout != g.layout()) throw std::invalid_argument("exact_skew: layout mismatch");
  const HessianMode mode =
      g.has_analytic_hessian() ? HessianMode::kAnalytic : HessianMode::kFiniteDifference;
  const GameHessian h = game_hessian(g, w, mode, fd_step);
  return SkewCorrection(g.layout(), [&](int i, int j) {
    return Matrix(0.5 * (h.block(i, j) - h.block(j, i).transpose()));
  });
}

double skew_error(const SkewCorrection& approx, const SkewCorrection& exact) {
  if (approx.layout() != exact.layout()) {
    throw std::invalid_argument("skew_error: layout mismatch");
  }
  return spectral_norm(approx.full() - exact.full());
}

std::vector<SkewBoundTrial> run_skew_bound_trials(int trials, std::uint64_t seed, double slack) {
  if (trials < 1) throw std::invalid_argument("run_skew_bound_trials: trials must be >= 1");
  std::mt19937_64 rng(seed);
  const double deltas[] = {0.01, 0.1, 1.0};

  std::vector<SkewBoundTrial> out;
  out.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    const int h = 2 + static_cast<int>(rng() % 4);  // 2..5 players
    std::vector<int> dims(h);
    for (int& d : dims) d = 1 + static_cast<int>(rng() % 3);  // block sizes 1..3
    const BlockLayout layout(dims);
    const double delta = deltas[rng() % 3];

    std::vector<Matrix> exact_jacobians;
    std::vector<Matrix> perturbed;
    double max_err = 0.0;
    for (int i = 0; i < h; ++i) {
      Matrix j(layout.dim(i), layout.total());
      for (Eigen::Index r = 0; r < j.rows(); ++r) {
        for (Eigen::Index c = 0; c < j.cols(); ++c) j(r, c) = normal_unit(rng);
      }
      Matrix noise(j.rows(), j.cols());
      for (Eigen::Index r = 0; r < noise.rows(); ++r) {
        for (Eigen::Index c = 0; c < noise.cols(); ++c) noise(r, c) = normal_unit(rng);
      }
      // Rescale the perturbation to a spectral norm of at most delta.
      const double target = delta * uniform_range(rng, 0.2, 1.0);
      noise *= target / spectral_norm(noise);
      max_err = std::max(max_err, spectral_norm(noise));
      perturbed.push_back(j + noise);
      exact_jacobians.push_back(std::move(j));
    }

    const SkewCorrection a_exact =
        build_skew_correction(SecantState{layout, exact_jacobians, false});
    const SkewCorrection a_hat = build_skew_correction(SecantState{layout, perturbed, false});

    SkewBoundTrial trial;
    trial.error = skew_error(a_hat, a_exact);
    trial.max_player_error = max_err;
    trial.bound = (h - 1) * max_err;
    trial.within_bound = trial.error <= trial.bound + slack;
    out.push_back(trial);
  }
  return out;
}

}  // namespace mlrsga
