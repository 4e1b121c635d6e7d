#include "mlrsga/experiments.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace mlrsga {

namespace {

double dtanh(double u) {
  const double t = std::tanh(u);
  return 1.0 - t * t;
}

Matrix scalar_block(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

BenchmarkGame paper_game() {
  BlockLayout layout({2, 1, 1});

  // w = (x1, x2, y, z)
  std::vector<ObjectiveFn> objectives = {
      [](const Vector& w) {
        return 0.5 * (w[0] * w[0] + w[1] * w[1]) + w[0] * std::tanh(w[2]) +
               0.9 * w[1] * std::tanh(w[3]);
      },
      [](const Vector& w) {
        return 0.5 * w[2] * w[2] - w[2] * std::tanh(w[0]) + 0.8 * w[2] * std::tanh(w[3]);
      },
      [](const Vector& w) {
        return 0.5 * w[3] * w[3] - 0.9 * w[3] * std::tanh(w[1]) - 0.8 * w[3] * std::tanh(w[2]);
      },
  };

  std::vector<GradientFn> gradients = {
      [](const Vector& w) {
        Vector g(2);
        g[0] = w[0] + std::tanh(w[2]);
        g[1] = w[1] + 0.9 * std::tanh(w[3]);
        return g;
      },
      [](const Vector& w) {
        Vector g(1);
        g[0] = w[2] - std::tanh(w[0]) + 0.8 * std::tanh(w[3]);
        return g;
      },
      [](const Vector& w) {
        Vector g(1);
        g[0] = w[3] - 0.9 * std::tanh(w[1]) - 0.8 * std::tanh(w[2]);
        return g;
      },
  };

  std::vector<std::vector<HessianBlockFn>> hessian(3);
  hessian[0] = {
      [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); },
      [](const Vector& w) {
        Matrix b(2, 1);
        b(0, 0) = dtanh(w[2]);
        b(1, 0) = 0.0;
        return b;
      },
      [](const Vector& w) {
        Matrix b(2, 1);
        b(0, 0) = 0.0;
        b(1, 0) = 0.9 * dtanh(w[3]);
        return b;
      },
  };
  hessian[1] = {
      [](const Vector& w) {
        Matrix b(1, 2);
        b(0, 0) = -dtanh(w[0]);
        b(0, 1) = 0.0;
        return b;
      },
      [](const Vector&) { return scalar_block(1.0); },
      [](const Vector& w) { return scalar_block(0.8 * dtanh(w[3])); },
  };
  hessian[2] = {
      [](const Vector& w) {
        Matrix b(1, 2);
        b(0, 0) = 0.0;
        b(0, 1) = -0.9 * dtanh(w[1]);
        return b;
      },
      [](const Vector& w) { return scalar_block(-0.8 * dtanh(w[2])); },
      [](const Vector&) { return scalar_block(1.0); },
  };

  Game game(layout, std::move(objectives), std::move(gradients), std::move(hessian));

  Vector eq = Vector::Zero(4);
  Vector start(4);
  start << 1.0, -0.8, 0.9, -0.7;

  return BenchmarkGame{std::move(game), "paper3", JointPoint(layout, eq),
                       JointPoint(layout, start),
                       "Three-player tanh-coupled benchmark; interior equilibrium at the origin."};
}

BenchmarkGame bilinear_game(double coupling) {
  BlockLayout layout({1, 1});
  const double c = coupling;

  std::vector<ObjectiveFn> objectives = {
      [c](const Vector& w) { return c * w[0] * w[1]; },
      [c](const Vector& w) { return -c * w[0] * w[1]; },
  };
  std::vector<GradientFn> gradients = {
      [c](const Vector& w) {
        Vector g(1);
        g[0] = c * w[1];
        return g;
      },
      [c](const Vector& w) {
        Vector g(1);
        g[0] = -c * w[0];
        return g;
      },
  };
  std::vector<std::vector<HessianBlockFn>> hessian(2);
  hessian[0] = {[](const Vector&) { return scalar_block(0.0); },
                [c](const Vector&) { return scalar_block(c); }};
  hessian[1] = {[c](const Vector&) { return scalar_block(-c); },
                [](const Vector&) { return scalar_block(0.0); }};

  Game game(layout, std::move(objectives), std::move(gradients), std::move(hessian));

  Vector eq = Vector::Zero(2);
  Vector start(2);
  start << 1.0, 0.0;

  std::ostringstream note;
  note << "Bilinear two-player game with coupling " << c << ".";
  return BenchmarkGame{std::move(game), "bilinear", JointPoint(layout, eq),
                       JointPoint(layout, start), note.str()};
}

BenchmarkGame random_quadratic_game(int players, const std::vector<int>& dims,
                                    std::uint64_t seed, double stability_margin) {
  if (static_cast<int>(dims.size()) != players) {
    throw std::invalid_argument("random_quadratic_game: dims length must equal players");
  }
  if (!(stability_margin > 0.0)) {
    throw std::invalid_argument("random_quadratic_game: stability_margin must be > 0");
  }
  const BlockLayout layout(dims);
  const int d = layout.total();

  std::uint64_t used_seed = seed;
  std::vector<Matrix> p_blocks;
  std::vector<std::vector<Matrix>> b_blocks;
  for (int attempt = 0; attempt < 32; ++attempt, ++used_seed) {
    std::mt19937_64 rng(used_seed);
    p_blocks.clear();
    b_blocks.assign(players, std::vector<Matrix>(players));
    for (int i = 0; i < players; ++i) {
      const int di = layout.dim(i);
      Matrix gmat(di, di);
      for (Eigen::Index r = 0; r < di; ++r) {
        for (Eigen::Index c = 0; c < di; ++c) gmat(r, c) = uniform_range(rng, -1.0, 1.0);
      }
      p_blocks.push_back(Matrix(stability_margin * Matrix::Identity(di, di) +
                                gmat.transpose() * gmat));
      for (int j = 0; j < players; ++j) {
        if (j == i) continue;
        Matrix b(di, layout.dim(j));
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
          for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = uniform_range(rng, -0.5, 0.5);
        }
        b_blocks[i][j] = std::move(b);
      }
    }
    Matrix h(d, d);
    for (int i = 0; i < players; ++i) {
      for (int j = 0; j < players; ++j) {
        h.block(layout.offset(i), layout.offset(j), layout.dim(i), layout.dim(j)) =
            (i == j) ? p_blocks[i] : b_blocks[i][j];
      }
    }
    const Eigen::JacobiSVD<Matrix> svd(h);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin > 1e-10 * std::max(1.0, smax)) break;
    if (attempt == 31) {
      throw std::runtime_error("random_quadratic_game: could not draw a nonsingular Hessian");
    }
  }

  std::vector<ObjectiveFn> objectives;
  std::vector<GradientFn> gradients;
  std::vector<std::vector<HessianBlockFn>> hessian(players,
                                                   std::vector<HessianBlockFn>(players));
  for (int i = 0; i < players; ++i) {
    const int off = layout.offset(i);
    const int di = layout.dim(i);
    const Matrix p = p_blocks[i];
    const std::vector<Matrix> row = b_blocks[i];
    objectives.push_back([layout, off, di, p, row, i](const Vector& w) {
      const Vector xi = w.segment(off, di);
      double v = 0.5 * xi.dot(p * xi);
      for (int j = 0; j < layout.players(); ++j) {
        if (j == i) continue;
        v += xi.dot(row[j] * w.segment(layout.offset(j), layout.dim(j)));
      }
      return v;
    });
    gradients.push_back([layout, off, di, p, row, i](const Vector& w) {
      Vector g = p * w.segment(off, di);
      for (int j = 0; j < layout.players(); ++j) {
        if (j == i) continue;
        g += row[j] * w.segment(layout.offset(j), layout.dim(j));
      }
      return g;
    });
    for (int j = 0; j < players; ++j) {
      const Matrix blk = (i == j) ? p_blocks[i] : b_blocks[i][j];
      hessian[i][j] = [blk](const Vector&) { return blk; };
    }
  }

  Game game(layout, std::move(objectives), std::move(gradients), std::move(hessian));

  // Seeded start on the unit cube, from a generator independent of the draws above.
  std::mt19937_64 start_rng(used_seed ^ 0xa5a5a5a5a5a5a5a5ull);
  Vector start(d);
  for (int p = 0; p < d; ++p) start[p] = uniform_range(start_rng, -1.0, 1.0);

  std::ostringstream note;
  note << "Random quadratic game, seed " << used_seed;
  if (used_seed != seed) note << " (requested " << seed << ", singular draws skipped)";
  note << ".";
  return BenchmarkGame{std::move(game), "randquad",
                       JointPoint(layout, Vector(Vector::Zero(d))), JointPoint(layout, start),
                       note.str()};
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {"paper3", "bilinear", "randquad"};
  return names;
}

BenchmarkGame make_benchmark(const std::string& name, const BenchmarkParams& params) {
  if (name == "paper3") return paper_game();
  if (name == "bilinear") return bilinear_game(params.coupling);
  if (name == "randquad") {
    return random_quadratic_game(params.players, params.dims, params.seed,
                                 params.stability_margin);
  }
  std::ostringstream os;
  os << "unknown game '" << name << "' (known:";
  for (const std::string& n : benchmark_names()) os << " " << n;
  os << ")";
  throw std::invalid_argument(os.str());
}

int count_sign_changes(const std::vector<TraceRecord>& records, int burn_in) {
  int changes = 0;
  double prev_residual = 0.0;
  int prev_sign = 0;
  bool have_prev = false;
  for (const TraceRecord& rec : records) {
    if (rec.k < burn_in) continue;
    if (have_prev) {
      const double diff = rec.residual - prev_residual;
      if (diff != 0.0) {
        const int sign = diff > 0.0 ? 1 : -1;
        if (prev_sign != 0 && sign != prev_sign) ++changes;
        prev_sign = sign;
      }
    }
    prev_residual = rec.residual;
    have_prev = true;
  }
  return changes;
}

ComparisonReport compare_solvers(const BenchmarkGame& bg, const SolverConfig& cfg_multi,
                                 const SolverConfig& cfg_gd,
                                 const std::optional<SolverConfig>& cfg_sga, int burn_in) {
  if (!bg.default_start.has_value()) {
    throw std::invalid_argument("compare_solvers: benchmark has no default start");
  }
  const JointPoint& w0 = *bg.default_start;
  auto check_shared = [&](const SolverConfig& cfg, const char* name) {
    if (cfg.residual_tol != cfg_multi.residual_tol || cfg.max_iter != cfg_multi.max_iter) {
      std::ostringstream os;
      os << "compare_solvers: " << name
         << " config must share residual_tol and max_iter with the multilrsga config";
      throw std::invalid_argument(os.str());
    }
  };
  check_shared(cfg_gd, "gd");
  if (cfg_sga.has_value()) check_shared(*cfg_sga, "sga");

  ComparisonReport report;
  report.rate_burn_in = burn_in;
  report.oscillation_burn_in = burn_in;

  auto add = [&](const std::string& name, SolverTrace trace) {
    SolverComparison leg;
    leg.solver = name;
    leg.oscillation_sign_changes = count_sign_changes(trace.records, burn_in);
    if (trace.status == SolverStatus::kConverged) {
      leg.iterations_to_tolerance = trace.iterations;
    }
    try {
      leg.rate = estimate_linear_rate(trace, burn_in);
    } catch (const std::invalid_argument&) {
      leg.rate = std::nullopt;
    }
    leg.trace = std::move(trace);
    report.solvers.push_back(std::move(leg));
  };

  add("multilrsga", run_multilrsga(bg.game, w0, cfg_multi));
  add("gd", run_gradient_descent(bg.game, w0, cfg_gd));
  if (cfg_sga.has_value()) add("sga", run_exact_sga(bg.game, w0, *cfg_sga));
  return report;
}

}  // namespace mlrsga
