#include "mlrsga/secant.hpp"

#include <cmath>

#include <doctest.h>

#include "mlrsga/correction.hpp"
#include "mlrsga/experiments.hpp"
#include "oracles.hpp"

using namespace mlrsga;

namespace {

// Game whose gradient map is the fixed linear map w -> J w, split by rows
// into the player blocks. Its per-player Jacobians are constant.
Game linear_gradient_game(const BlockLayout& layout, const Matrix& j) {
  std::vector<ObjectiveFn> objectives;
  std::vector<GradientFn> gradients;
  for (int i = 0; i < layout.players(); ++i) {
    const Matrix rows = j.middleRows(layout.offset(i), layout.dim(i));
    objectives.push_back([](const Vector&) { return 0.0; });  // not used
    gradients.push_back([rows](const Vector& w) { return Vector(rows * w); });
  }
  return Game(layout, std::move(objectives), std::move(gradients));
}

}  // namespace

TEST_CASE("zero initialization") {
  const BenchmarkGame bg = paper_game();
  const SecantState state =
      init_secant(bg.game, *bg.default_start, {SecantInit::kZero, 0, 0.1});
  REQUIRE(state.matrices.size() == 3);
  CHECK(state.matrices[0] == Matrix::Zero(2, 4));
  CHECK(state.matrices[1] == Matrix::Zero(1, 4));
  CHECK(state.matrices[2] == Matrix::Zero(1, 4));
}

TEST_CASE("finite-difference initialization recovers constant Jacobians") {
  const BenchmarkGame bl = bilinear_game(1.0);
  const SecantState state =
      init_secant(bl.game, *bl.default_start, {SecantInit::kFiniteDifference, 0, 0.1});
  Matrix m1(1, 2), m2(1, 2);
  m1 << 0, 1;
  m2 << -1, 0;
  CHECK((state.matrices[0] - m1).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((state.matrices[1] - m2).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("random initialization is seed-deterministic with FD own blocks") {
  const BenchmarkGame bg = paper_game();
  const SecantInitConfig cfg{SecantInit::kRandom, 99, 0.1};
  const SecantState a = init_secant(bg.game, *bg.default_start, cfg);
  const SecantState b = init_secant(bg.game, *bg.default_start, cfg);
  for (int i = 0; i < 3; ++i) CHECK(a.matrices[i] == b.matrices[i]);

  const SecantState other = init_secant(bg.game, *bg.default_start, {SecantInit::kRandom, 100, 0.1});
  CHECK(a.matrices[0] != other.matrices[0]);

  // Own blocks come from finite differences, mixed entries stay within scale.
  const BlockLayout& layout = bg.game.layout();
  for (int i = 0; i < 3; ++i) {
    const Matrix fd = player_jacobian(bg.game, bg.default_start->values, i,
                                      HessianMode::kFiniteDifference, 1e-5);
    CHECK(block_get(a.matrices[i], layout, i, i) == block_get(fd, layout, i, i));
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      CHECK(block_get(a.matrices[i], layout, i, j).cwiseAbs().maxCoeff() <= 0.1);
    }
  }

  CHECK_THROWS_AS(init_secant(bg.game, *bg.default_start, {SecantInit::kRandom, 1, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(init_secant(bg.game, *bg.default_start, {SecantInit::kRandom, 1, -0.5}),
                  std::invalid_argument);
}

TEST_CASE("zero step skips the update") {
  const BenchmarkGame bg = paper_game();
  const JointPoint w0 = *bg.default_start;
  SecantState state = init_secant(bg.game, w0, {SecantInit::kRandom, 7, 0.1});
  const SecantState before = state;

  broyden_update(state, bg.game, w0, w0, default_skip_tol(w0.values));
  CHECK(state.last_update_skipped);
  for (int i = 0; i < 3; ++i) CHECK(state.matrices[i] == before.matrices[i]);
}

TEST_CASE("scalar secant condition pins the updated entry") {
  // One player, one dimension, gradient moving 0 -> 2 over a unit step.
  Game g(BlockLayout({1}), {[](const Vector& w) { return w[0] * w[0]; }},
         {[](const Vector& w) { return Vector(2.0 * w); }});
  SecantState state = init_secant(g, JointPoint(g.layout(), Vector::Zero(1)),
                                  {SecantInit::kZero, 0, 0.1});
  Vector one(1);
  one << 1.0;
  broyden_update(state, g, JointPoint(g.layout(), Vector::Zero(1)),
                 JointPoint(g.layout(), one), 0.0);
  CHECK_FALSE(state.last_update_skipped);
  CHECK(state.matrices[0](0, 0) == 2.0);
}

TEST_CASE("update is least-change toward a constant Jacobian") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    const BlockLayout layout({2, 1, 2});
    const Matrix j = oracles::random_matrix(rng, 5, 5);
    const Game g = linear_gradient_game(layout, j);

    SecantState state{layout, {}, false};
    for (int i = 0; i < 3; ++i) {
      state.matrices.push_back(oracles::random_matrix(rng, layout.dim(i), 5));
    }

    const Vector w_old = oracles::random_vector(rng, 5);
    const Vector w_new = oracles::random_vector(rng, 5);
    const Vector s = w_new - w_old;
    const Vector f_old = game_gradient(g, w_old);
    const Vector f_new = game_gradient(g, w_new);

    std::vector<double> frob_before;
    for (int i = 0; i < 3; ++i) {
      frob_before.push_back(
          (state.matrices[i] - j.middleRows(layout.offset(i), layout.dim(i))).norm());
    }
    broyden_update(state, s, f_old, f_new, 0.0);

    for (int i = 0; i < 3; ++i) {
      const Matrix ji = j.middleRows(layout.offset(i), layout.dim(i));
      const Vector yi = f_new.segment(layout.offset(i), layout.dim(i)) -
                        f_old.segment(layout.offset(i), layout.dim(i));
      // Secant condition and the classical least-change property.
      CHECK((state.matrices[i] * s - yi).norm() <= 1e-12 * std::max(1.0, yi.norm()));
      CHECK((state.matrices[i] - ji).norm() <= frob_before[i] + 1e-12);
    }
  }
}

TEST_CASE("every non-skipped update is rank-one and satisfies the secant condition") {
  const BenchmarkGame bg = paper_game();
  const BlockLayout& layout = bg.game.layout();
  SecantState state = init_secant(bg.game, *bg.default_start, {SecantInit::kRandom, 11, 0.1});

  Vector w = bg.default_start->values;
  Vector f = game_gradient(bg.game, w);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const Vector w_next = w - 0.05 * f + 0.01 * oracles::random_vector(rng, 4);
    const Vector f_next = game_gradient(bg.game, w_next);
    const Vector s = w_next - w;

    const std::vector<Matrix> before = state.matrices;
    broyden_update(state, s, f, f_next, default_skip_tol(w));
    REQUIRE_FALSE(state.last_update_skipped);

    for (int i = 0; i < layout.players(); ++i) {
      const Vector yi = f_next.segment(layout.offset(i), layout.dim(i)) -
                        f.segment(layout.offset(i), layout.dim(i));
      CHECK((state.matrices[i] * s - yi).norm() <= 1e-12 * std::max(1.0, yi.norm()));

      const Vector sv = oracles::svd_values(state.matrices[i] - before[i]);
      if (sv.size() > 1) CHECK(sv[1] <= 1e-12 * sv[0]);
    }
    w = w_next;
    f = f_next;
  }
}

TEST_CASE("secant error against reference Jacobians") {
  const BenchmarkGame bl = bilinear_game(1.0);
  const JointPoint origin(bl.game.layout(), Vector::Zero(2));

  const SecantState fd_state =
      init_secant(bl.game, origin, {SecantInit::kFiniteDifference, 0, 0.1});
  for (const double err : secant_error(fd_state, bl.game, origin)) CHECK(err <= 1e-6);

  const SecantState zero_state = init_secant(bl.game, origin, {SecantInit::kZero, 0, 0.1});
  const std::vector<double> errs = secant_error(zero_state, bl.game, origin);
  CHECK(errs[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(errs[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("secant errors are non-increasing on constant-Jacobian games") {
  // L_i = 0 specialization of the error-growth bound: with a constant
  // Jacobian the projector structure of the update cannot increase the error.
  const BenchmarkGame bg = random_quadratic_game(3, {2, 1, 2}, 321, 0.5);
  const BlockLayout& layout = bg.game.layout();

  SecantState state = init_secant(bg.game, *bg.default_start, {SecantInit::kRandom, 5, 0.1});
  std::vector<double> prev;
  for (int i = 0; i < layout.players(); ++i) {
    prev.push_back(oracles::svd_norm(
        state.matrices[i] -
        player_jacobian(bg.game, bg.default_start->values, i, HessianMode::kAnalytic)));
  }

  Vector w = bg.default_start->values;
  Vector f = game_gradient(bg.game, w);
  for (int k = 0; k < 100; ++k) {
    const SkewCorrection a = build_skew_correction(state);
    const Vector w_next = w - 0.01 * (f - a.full() * f);
    const Vector f_next = game_gradient(bg.game, w_next);
    broyden_update(state, w_next - w, f, f_next, default_skip_tol(w));
    if (!state.last_update_skipped) {
      for (int i = 0; i < layout.players(); ++i) {
        const double err = oracles::svd_norm(
            state.matrices[i] - player_jacobian(bg.game, w_next, i, HessianMode::kAnalytic));
        CHECK(err <= prev[i] + 1e-12);
        prev[i] = err;
      }
    }
    w = w_next;
    f = f_next;
  }
}

TEST_CASE("error growth stays within the Lipschitz bound along a run") {
  // General form of the per-player bound: the secant error grows by at most
  // 2 L_i max(||w_k - w*||, ||w_{k+1} - w*||) per step. L_i is estimated by
  // FD Jacobian quotients over the sampled segment.
  const BenchmarkGame bg = paper_game();
  const BlockLayout& layout = bg.game.layout();
  const Vector w_star = bg.known_equilibrium->values;

  SecantState state = init_secant(bg.game, *bg.default_start, {SecantInit::kRandom, 12345, 0.1});

  struct Step {
    std::vector<double> errors;
    double dist = 0.0;
  };
  std::vector<Step> steps;
  std::vector<double> lipschitz(layout.players(), 0.0);

  auto record = [&](const Vector& w) {
    Step st;
    st.dist = (w - w_star).norm();
    for (int i = 0; i < layout.players(); ++i) {
      st.errors.push_back(oracles::svd_norm(
          state.matrices[i] -
          player_jacobian(bg.game, w_star, i, HessianMode::kFiniteDifference, 1e-6)));
    }
    steps.push_back(std::move(st));
  };

  Vector w = bg.default_start->values;
  Vector f = game_gradient(bg.game, w);
  record(w);
  for (int k = 0; k < 1500; ++k) {
    const SkewCorrection a = build_skew_correction(state);
    const Vector w_next = w - 0.01 * (f - a.full() * f);
    const Vector f_next = game_gradient(bg.game, w_next);

    for (int i = 0; i < layout.players(); ++i) {
      const Matrix j_new =
          player_jacobian(bg.game, w_next, i, HessianMode::kFiniteDifference, 1e-6);
      const Matrix j_old = player_jacobian(bg.game, w, i, HessianMode::kFiniteDifference, 1e-6);
      const Matrix j_star =
          player_jacobian(bg.game, w_star, i, HessianMode::kFiniteDifference, 1e-6);
      const double step_norm = (w_next - w).norm();
      if (step_norm > 0.0) {
        lipschitz[i] = std::max(lipschitz[i], oracles::svd_norm(j_new - j_old) / step_norm);
      }
      const double dist = (w - w_star).norm();
      if (dist > 0.0) {
        lipschitz[i] = std::max(lipschitz[i], oracles::svd_norm(j_old - j_star) / dist);
      }
    }

    broyden_update(state, w_next - w, f, f_next, default_skip_tol(w));
    w = w_next;
    f = f_next;
    record(w);
  }

  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    for (int i = 0; i < layout.players(); ++i) {
      const double allowed = steps[k].errors[i] +
                             2.0 * lipschitz[i] *
                                 std::max(steps[k].dist, steps[k + 1].dist) +
                             1e-10;
      CHECK(steps[k + 1].errors[i] <= allowed);
    }
  }
}
