#include "mlrsga/correction.hpp"

#include <doctest.h>

#include "mlrsga/experiments.hpp"
#include "oracles.hpp"

using namespace mlrsga;

TEST_CASE("two scalar players: closed-form corner entry") {
  const BlockLayout layout({1, 1});
  Matrix m1(1, 2), m2(1, 2);
  m1 << 1.0, 2.0;  // (a, b)
  m2 << 3.0, 4.0;  // (c, d)
  const SkewCorrection a = build_skew_correction(SecantState{layout, {m1, m2}, false});
  // Corner is (b - c) / 2.
  CHECK(a.full()(0, 1) == doctest::Approx(-0.5));
  CHECK(a.full()(1, 0) == doctest::Approx(0.5));
  CHECK(a.full()(0, 0) == 0.0);
  CHECK(a.full()(1, 1) == 0.0);
}

TEST_CASE("zero state gives the zero correction") {
  const BlockLayout layout({2, 1, 1});
  std::vector<Matrix> ms;
  for (int i = 0; i < 3; ++i) ms.push_back(Matrix::Zero(layout.dim(i), 4));
  CHECK(build_skew_correction(SecantState{layout, ms, false}).full() == Matrix::Zero(4, 4));
}

TEST_CASE("exact Jacobian state reproduces the exact skew part") {
  const BlockLayout layout({1, 1});
  Matrix m1(1, 2), m2(1, 2);
  m1 << 0.0, 1.0;
  m2 << -1.0, 0.0;
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  CHECK(build_skew_correction(SecantState{layout, {m1, m2}, false}).full() == rot);
}

TEST_CASE("exact skew of benchmark games") {
  const BenchmarkGame bl = bilinear_game(1.0);
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  CHECK(exact_skew(bl.game, *bl.known_equilibrium).full() == rot);

  // Potential game: symmetric Hessian, zero skew part.
  const auto potential = [](const Vector& w) { return 0.5 * w.squaredNorm() + w[0] * w[1]; };
  Game pot(BlockLayout({1, 1}), {potential, potential});
  std::mt19937_64 rng(3);
  const JointPoint w(pot.layout(), oracles::random_vector(rng, 2));
  CHECK(oracles::svd_norm(exact_skew(pot, w).full()) <= 1e-6);

  // Three-player benchmark at the equilibrium, against the hand-computed blocks.
  const BenchmarkGame bg = paper_game();
  Matrix expected(4, 4);
  expected << 0, 0, 1, 0,  //
      0, 0, 0, 0.9,        //
      -1, 0, 0, 0.8,       //
      0, -0.9, -0.8, 0;
  const SkewCorrection analytic = exact_skew(bg.game, *bg.known_equilibrium);
  CHECK((analytic.full() - expected).cwiseAbs().maxCoeff() == 0.0);

  // FD route agrees with the analytic blocks.
  Game fd_only(bg.game.layout(),
               {[&](const Vector& w2) { return bg.game.objective(0, w2); },
                [&](const Vector& w2) { return bg.game.objective(1, w2); },
                [&](const Vector& w2) { return bg.game.objective(2, w2); }});
  const SkewCorrection fd = exact_skew(fd_only, *bg.known_equilibrium, 1e-4);
  CHECK((fd.full() - expected).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("antisymmetry is exact by construction") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int players = 2 + static_cast<int>(rng() % 4);
    std::vector<int> dims;
    for (int i = 0; i < players; ++i) dims.push_back(1 + static_cast<int>(rng() % 3));
    const BlockLayout layout(dims);

    std::vector<Matrix> ms;
    for (int i = 0; i < players; ++i) {
      ms.push_back(oracles::random_matrix(rng, layout.dim(i), layout.total(), -5.0, 5.0));
    }
    const SkewCorrection a = build_skew_correction(SecantState{layout, ms, false});
    CHECK((a.full() + a.full().transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < players; ++i) {
      CHECK(a.block(i, i) == Matrix::Zero(layout.dim(i), layout.dim(i)));
    }
  }
}

TEST_CASE("secant-built correction matches the exact one on exact Jacobians") {
  const BenchmarkGame bg = paper_game();
  std::mt19937_64 rng(29);
  const JointPoint w(bg.game.layout(), oracles::random_vector(rng, 4, -1.5, 1.5));

  SecantState state{bg.game.layout(), {}, false};
  for (int i = 0; i < 3; ++i) {
    state.matrices.push_back(
        player_jacobian(bg.game, w.values, i, HessianMode::kFiniteDifference, 1e-5));
  }
  const SkewCorrection from_secant = build_skew_correction(state);
  const SkewCorrection exact = exact_skew(bg.game, w);
  CHECK((from_secant.full() - exact.full()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("skew error and layout checks") {
  const BenchmarkGame bl = bilinear_game(1.0);
  const SkewCorrection a = exact_skew(bl.game, *bl.known_equilibrium);
  CHECK(skew_error(a, a) == 0.0);

  const BenchmarkGame bg = paper_game();
  const SkewCorrection b = exact_skew(bg.game, *bg.known_equilibrium);
  CHECK_THROWS_AS(skew_error(a, b), std::invalid_argument);
}

TEST_CASE("randomized error bound trials stay within (h-1) delta") {
  const std::vector<SkewBoundTrial> trials = run_skew_bound_trials(1000, 424242);
  REQUIRE(trials.size() == 1000);
  int passes = 0;
  for (const SkewBoundTrial& t : trials) {
    if (t.within_bound) ++passes;
    CHECK(t.error <= t.bound + 1e-12);
  }
  CHECK(passes == 1000);
}

TEST_CASE("two-player reduction obeys the plain delta bound") {
  // With h = 2 the factor (h - 1) disappears.
  std::mt19937_64 rng(987);
  for (int trial = 0; trial < 200; ++trial) {
    const BlockLayout layout({1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3)});
    std::vector<Matrix> exact, noisy;
    double delta = 0.0;
    for (int i = 0; i < 2; ++i) {
      const Matrix j = oracles::random_matrix(rng, layout.dim(i), layout.total());
      Matrix noise = oracles::random_matrix(rng, layout.dim(i), layout.total());
      noise *= uniform_range(rng, 0.01, 1.0) / oracles::svd_norm(noise);
      delta = std::max(delta, oracles::svd_norm(noise));
      exact.push_back(j);
      noisy.push_back(j + noise);
    }
    const SkewCorrection a_exact = build_skew_correction(SecantState{layout, exact, false});
    const SkewCorrection a_hat = build_skew_correction(SecantState{layout, noisy, false});
    CHECK(oracles::svd_norm(a_hat.full() - a_exact.full()) <= delta + 1e-12);
  }
}
