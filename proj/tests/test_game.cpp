#include "mlrsga/game.hpp"

#include <cmath>

#include <doctest.h>

#include "mlrsga/experiments.hpp"
#include "oracles.hpp"

using namespace mlrsga;

namespace {

// Two-player quadratic game f_i = w^T Q_i w / 2 built from objectives only,
// so the finite-difference fallback chain is exercised end to end.
Game quadratic_game(const Matrix& q1, const Matrix& q2) {
  return Game(BlockLayout({1, 1}),
              {[q1](const Vector& w) { return 0.5 * w.dot(q1 * w); },
               [q2](const Vector& w) { return 0.5 * w.dot(q2 * w); }});
}

JointPoint paper_point(double x1, double x2, double y, double z) {
  Vector v(4);
  v << x1, x2, y, z;
  return JointPoint(BlockLayout({2, 1, 1}), v);
}

}  // namespace

TEST_CASE("joint point validation") {
  const BlockLayout layout({2, 1});
  CHECK_THROWS_AS(JointPoint(layout, Vector::Zero(2)), std::invalid_argument);
  Vector bad(3);
  bad << 1.0, std::nan(""), 0.0;
  CHECK_THROWS_AS(JointPoint(layout, bad), std::invalid_argument);

  Vector v(3);
  v << 3.0, 4.0, -2.0;
  const JointPoint w(layout, v);
  CHECK(w.block(0).size() == 2);
  CHECK(w.block_norms()[0] == doctest::Approx(5.0));
  CHECK(w.block_norms()[1] == doctest::Approx(2.0));
}

TEST_CASE("game gradient stacks the player blocks") {
  const BenchmarkGame bg = paper_game();

  CHECK(game_gradient(bg.game, paper_point(0, 0, 0, 0)).norm() == 0.0);

  // Components of the first-order conditions evaluated by hand.
  const Vector f = game_gradient(bg.game, paper_point(1.0, -0.8, 0.9, -0.7));
  CHECK(f[0] == doctest::Approx(1.0 + std::tanh(0.9)).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(-0.8 + 0.9 * std::tanh(-0.7)).epsilon(1e-15));
  CHECK(f[2] == doctest::Approx(0.9 - std::tanh(1.0) + 0.8 * std::tanh(-0.7)).epsilon(1e-15));
  CHECK(f[3] ==
        doctest::Approx(-0.7 - 0.9 * std::tanh(-0.8) - 0.8 * std::tanh(0.9)).epsilon(1e-15));

  const BenchmarkGame bl = bilinear_game(1.0);
  Vector w(2);
  w << 1.0, 0.0;
  const Vector fb = game_gradient(bl.game, w);
  CHECK(fb[0] == 0.0);
  CHECK(fb[1] == -1.0);
}

TEST_CASE("game gradient flags a non-finite evaluator") {
  Game g(BlockLayout({1, 1}),
         {[](const Vector& w) { return w[0]; }, [](const Vector& w) { return w[1]; }},
         {[](const Vector&) {
            Vector v(1);
            v << 1.0;
            return v;
          },
          [](const Vector&) {
            Vector v(1);
            v << std::numeric_limits<double>::infinity();
            return v;
          }});
  CHECK_THROWS_WITH_AS(game_gradient(g, JointPoint(g.layout(), Vector::Zero(2))),
                       doctest::Contains("player 1"), std::runtime_error);
}

TEST_CASE("quadratic game has a constant Hessian matching the quadratic form") {
  std::mt19937_64 rng(31);
  Matrix q1 = oracles::random_matrix(rng, 2, 2);
  Matrix q2 = oracles::random_matrix(rng, 2, 2);
  q1 = (q1 + q1.transpose()).eval();  // symmetric forms so grad f_i = Q_i w
  q2 = (q2 + q2.transpose()).eval();
  const Game g = quadratic_game(q1, q2);

  const JointPoint a(g.layout(), oracles::random_vector(rng, 2));
  const JointPoint b(g.layout(), oracles::random_vector(rng, 2));
  const GameHessian ha = game_hessian(g, a, HessianMode::kFiniteDifference, 1e-4);
  const GameHessian hb = game_hessian(g, b, HessianMode::kFiniteDifference, 1e-4);

  CHECK((ha.full.row(0) - q1.row(0)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((ha.full.row(1) - q2.row(1)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((ha.full - hb.full).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("bilinear game Hessian is the rotation generator everywhere") {
  const BenchmarkGame bl = bilinear_game(1.0);
  Matrix expected(2, 2);
  expected << 0, 1, -1, 0;

  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    const JointPoint w(bl.game.layout(), oracles::random_vector(rng, 2, -2.0, 2.0));
    const Matrix analytic = game_hessian(bl.game, w, HessianMode::kAnalytic).full;
    const Matrix fd = game_hessian(bl.game, w, HessianMode::kFiniteDifference, 1e-5).full;
    CHECK((analytic - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK((fd - analytic).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("three-player benchmark Hessian at the equilibrium") {
  const BenchmarkGame bg = paper_game();
  const GameHessian h = game_hessian(bg.game, paper_point(0, 0, 0, 0), HessianMode::kAnalytic);

  Matrix expected(4, 4);
  expected << 1, 0, 1, 0,  //
      0, 1, 0, 0.9,        //
      -1, 0, 1, 0.8,       //
      0, -0.9, -0.8, 1;
  CHECK((h.full - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.block(0, 1) == expected.block(0, 2, 2, 1));

  const GameHessian fd =
      game_hessian(bg.game, paper_point(0, 0, 0, 0), HessianMode::kFiniteDifference, 1e-4);
  CHECK((fd.full - expected).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("finite-difference Hessian tracks the analytic one away from the equilibrium") {
  const BenchmarkGame bg = paper_game();
  std::mt19937_64 rng(77);
  for (int t = 0; t < 5; ++t) {
    const JointPoint w(bg.game.layout(), oracles::random_vector(rng, 4, -2.0, 2.0));
    const Matrix analytic = game_hessian(bg.game, w, HessianMode::kAnalytic).full;
    const Matrix fd = game_hessian(bg.game, w, HessianMode::kFiniteDifference, 1e-4).full;
    CHECK((fd - analytic).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("analytic mode without mixed blocks is an error") {
  const Game g = quadratic_game(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK_THROWS_AS(game_hessian(g, JointPoint(g.layout(), Vector::Zero(2))),
                  std::runtime_error);
}

TEST_CASE("symmetric/antisymmetric split") {
  std::mt19937_64 rng(13);

  Matrix sym = oracles::random_matrix(rng, 3, 3);
  sym = (sym + sym.transpose()).eval();
  CHECK(sa_decompose(sym).skew == Matrix::Zero(3, 3));

  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  const SymmetricSkewSplit split_rot = sa_decompose(rot);
  CHECK(split_rot.symmetric == Matrix::Zero(2, 2));
  CHECK(split_rot.skew == rot);

  const Matrix h = oracles::random_matrix(rng, 4, 4, -3.0, 3.0);
  const SymmetricSkewSplit split = sa_decompose(h);
  CHECK((split.symmetric + split.skew - h).cwiseAbs().maxCoeff() <= 1e-15);
  // Exact by construction, not merely up to rounding.
  CHECK((split.symmetric - split.symmetric.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((split.skew + split.skew.transpose()).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(sa_decompose(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("identical objectives make a potential game with zero skew part") {
  const auto potential = [](const Vector& w) {
    return 0.5 * w.squaredNorm() + w[0] * w[1] + std::sin(w[2]);
  };
  Game g(BlockLayout({1, 1, 1}), {potential, potential, potential});

  std::mt19937_64 rng(23);
  const JointPoint w(g.layout(), oracles::random_vector(rng, 3));
  const Vector f = game_gradient(g, w);

  // The stacked gradient is the gradient of the single potential.
  for (int p = 0; p < 3; ++p) {
    CHECK(f[p] == doctest::Approx(oracles::central_partial(potential, w.values, p, 1e-6))
                      .epsilon(1e-6));
  }
  const SymmetricSkewSplit split =
      sa_decompose(game_hessian(g, w, HessianMode::kFiniteDifference, 1e-4));
  CHECK(spectral_norm(split.skew) <= 1e-5);
}

TEST_CASE("first-order check") {
  const BenchmarkGame bg = paper_game();

  const FirstOrderCheck at_star =
      check_first_order(bg.game, paper_point(0, 0, 0, 0), 1e-12, /*with_second_order=*/true);
  CHECK(at_star.stationary);
  CHECK(at_star.residual == 0.0);
  REQUIRE(at_star.own_block_min_eigenvalues.size() == 3);
  for (const double lambda : at_star.own_block_min_eigenvalues) {
    CHECK(lambda == doctest::Approx(1.0).epsilon(1e-12));
  }

  const FirstOrderCheck at_start =
      check_first_order(bg.game, paper_point(1.0, -0.8, 0.9, -0.7), 1e-12);
  CHECK_FALSE(at_start.stationary);
  CHECK(at_start.residual > 1.0);

  const FirstOrderCheck loose = check_first_order(
      bg.game, paper_point(1.0, -0.8, 0.9, -0.7), std::numeric_limits<double>::infinity());
  CHECK(loose.stationary);

  CHECK_THROWS_AS(check_first_order(bg.game, paper_point(0, 0, 0, 0), -1.0),
                  std::invalid_argument);
}
