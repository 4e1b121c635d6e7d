#include "mlrsga/game.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mlrsga {

namespace {

// Central-difference step for gradients synthesized from objectives.
const double kObjectiveFdStep = std::cbrt(std::numeric_limits<double>::epsilon());

GradientFn make_fd_gradient(const ObjectiveFn& f, const BlockLayout& layout, int i) {
  const int off = layout.offset(i);
  const int di = layout.dim(i);
  return [f, off, di](const Vector& w) {
    Vector g(di);
    Vector wp = w;
    for (int p = 0; p < di; ++p) {
      const int idx = off + p;
      const double h = kObjectiveFdStep * std::max(1.0, std::abs(w[idx]));
      wp[idx] = w[idx] + h;
      const double fplus = f(wp);
      wp[idx] = w[idx] - h;
      const double fminus = f(wp);
      wp[idx] = w[idx];
      g[p] = (fplus - fminus) / (2.0 * h);
    }
    return g;
  };
}

}  // namespace

JointPoint::JointPoint(BlockLayout layout_in, Vector values_in)
    : layout(std::move(layout_in)), values(std::move(values_in)) {
  if (values.size() != layout.total()) {
    std::ostringstream os;
    os << "JointPoint: vector length " << values.size() << " does not match layout total "
       << layout.total();
    throw std::invalid_argument(os.str());
  }
  if (!all_finite(values)) throw std::invalid_argument("JointPoint: non-finite entries");
}

Vector JointPoint::block(int i) const {
  return values.segment(layout.offset(i), layout.dim(i));
}

std::vector<double> JointPoint::block_norms() const {
  std::vector<double> norms(layout.players());
  for (int i = 0; i < layout.players(); ++i) norms[i] = block(i).norm();
  return norms;
}

Game::Game(BlockLayout layout, std::vector<ObjectiveFn> objectives,
           std::vector<GradientFn> player_gradients,
           std::vector<std::vector<HessianBlockFn>> hessian_blocks)
    : layout_(std::move(layout)),
      objectives_(std::move(objectives)),
      gradients_(std::move(player_gradients)),
      hessian_blocks_(std::move(hessian_blocks)) {
  const int h = layout_.players();
  if (static_cast<int>(objectives_.size()) != h) {
    throw std::invalid_argument("Game: need exactly one objective per player");
  }
  if (gradients_.empty()) {
    gradients_.reserve(h);
    for (int i = 0; i < h; ++i) gradients_.push_back(make_fd_gradient(objectives_[i], layout_, i));
  } else if (static_cast<int>(gradients_.size()) != h) {
    throw std::invalid_argument("Game: need exactly one gradient evaluator per player");
  }
  if (!hessian_blocks_.empty()) {
    if (static_cast<int>(hessian_blocks_.size()) != h) {
      throw std::invalid_argument("Game: hessian blocks must form an h x h grid");
    }
    for (const auto& row : hessian_blocks_) {
      if (static_cast<int>(row.size()) != h) {
        throw std::invalid_argument("Game: hessian blocks must form an h x h grid");
      }
    }
  }
}

double Game::objective(int i, const Vector& w) const {
  layout_.check_player(i);
  return objectives_[i](w);
}

Vector Game::player_gradient(int i, const Vector& w) const {
  layout_.check_player(i);
  Vector g = gradients_[i](w);
  if (g.size() != layout_.dim(i)) {
    std::ostringstream os;
    os << "Game: gradient evaluator of player " << i << " returned length " << g.size()
       << ", expected " << layout_.dim(i);
    throw std::runtime_error(os.str());
  }
  return g;
}

Matrix Game::hessian_block(int i, int j, const Vector& w) const {
  layout_.check_player(i);
  layout_.check_player(j);
  if (!has_analytic_hessian()) {
    throw std::runtime_error("Game: no analytic mixed-derivative blocks supplied");
  }
  Matrix b = hessian_blocks_[i][j](w);
  if (b.rows() != layout_.dim(i) || b.cols() != layout_.dim(j)) {
    std::ostringstream os;
    os << "Game: hessian block (" << i << ", " << j << ") has shape " << b.rows() << "x"
       << b.cols() << ", expected " << layout_.dim(i) << "x" << layout_.dim(j);
    throw std::runtime_error(os.str());
  }
  return b;
}

Vector game_gradient(const Game& g, const Vector& w) {
  const BlockLayout& layout = g.layout();
  Vector out(layout.total());
  for (int i = 0; i < layout.players(); ++i) {
    const Vector gi = g.player_gradient(i, w);
    if (!all_finite(gi)) {
      std::ostringstream os;
      os << "game_gradient: player " << i << " gradient is non-finite";
      throw std::runtime_error(os.str());
    }
    out.segment(layout.offset(i), layout.dim(i)) = gi;
  }
  return out;
}

Vector game_gradient(const Game& g, const JointPoint& w) {
  if (w.layout != g.layout()) throw std::invalid_argument("game_gradient: layout mismatch");
  return game_gradient(g, w.values);
}

Matrix player_jacobian(const Game& g, const Vector& w, int i, HessianMode mode, double fd_step) {
  const BlockLayout& layout = g.layout();
  layout.check_player(i);
  if (mode == HessianMode::kAnalytic) {
    Matrix rows(layout.dim(i), layout.total());
    for (int j = 0; j < layout.players(); ++j) {
      rows.middleCols(layout.offset(j), layout.dim(j)) = g.hessian_block(i, j, w);
    }
    return rows;
  }
  if (!(fd_step > 0.0)) throw std::invalid_argument("player_jacobian: fd_step must be positive");
  Matrix rows(layout.dim(i), layout.total());
  Vector wp = w;
  for (int p = 0; p < layout.total(); ++p) {
    const double h = fd_step * std::max(1.0, std::abs(w[p]));
    wp[p] = w[p] + h;
    const Vector gplus = g.player_gradient(i, wp);
    wp[p] = w[p] - h;
    const Vector gminus = g.player_gradient(i, wp);
    wp[p] = w[p];
    rows.col(p) = (gplus - gminus) / (2.0 * h);
  }
  return rows;
}

GameHessian game_hessian(const Game& g, const JointPoint& w, HessianMode mode, double fd_step) {
  if (w.layout != g.layout()) throw std::invalid_argument("game_hessian: layout mismatch");
  const BlockLayout& layout = g.layout();
  Matrix full(layout.total(), layout.total());
  for (int i = 0; i < layout.players(); ++i) {
    full.middleRows(layout.offset(i), layout.dim(i)) =
        player_jacobian(g, w.values, i, mode, fd_step);
  }
  if (!all_finite(full)) throw std::runtime_error("game_hessian: non-finite entries");
  return GameHessian{layout, std::move(full)};
}

SymmetricSkewSplit sa_decompose(const Matrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("sa_decompose: matrix must be square");
  const Eigen::Index n = h.rows();
  Matrix s(n, n);
  Matrix a(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    s(p, p) = h(p, p);
    a(p, p) = 0.0;
    for (Eigen::Index q = p + 1; q < n; ++q) {
      const double sym = 0.5 * (h(p, q) + h(q, p));
      const double skw = 0.5 * (h(p, q) - h(q, p));
      s(p, q) = sym;
      s(q, p) = sym;
      a(p, q) = skw;
      a(q, p) = -skw;
    }
  }
  return SymmetricSkewSplit{std::move(s), std::move(a)};
}

SymmetricSkewSplit sa_decompose(const GameHessian& h) { return sa_decompose(h.full); }

FirstOrderCheck check_first_order(const Game& g, const JointPoint& w, double tol,
                                  bool with_second_order, double fd_step) {
  if (tol < 0.0) throw std::invalid_argument("check_first_order: tol must be >= 0");
  FirstOrderCheck out;
  out.residual = game_gradient(g, w).norm();
  out.stationary = out.residual <= tol;
  if (with_second_order) {
    const HessianMode mode =
        g.has_analytic_hessian() ? HessianMode::kAnalytic : HessianMode::kFiniteDifference;
    for (int i = 0; i < g.players(); ++i) {
      const Matrix block = block_get(player_jacobian(g, w.values, i, mode, fd_step),
                                     g.layout(), i, i);
      const Matrix sym = 0.5 * (block + block.transpose());
      Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
      out.own_block_min_eigenvalues.push_back(eig.eigenvalues().minCoeff());
    }
  }
  return out;
}

}  // namespace mlrsga
