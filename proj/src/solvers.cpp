#include "mlrsga/solvers.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mlrsga {

namespace {

Vector eval_gradient(const Game& g, const Vector& w, int k, const char* solver) {
  try {
    return game_gradient(g, w);
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << solver << ": iteration " << k << ": " << e.what();
    throw std::runtime_error(os.str());
  }
}

// Shared by all solvers so that the tau = 0 paths are arithmetically
// identical to plain gradient descent.
Vector step_direction(const Vector& f, double tau, const Matrix* a) {
  if (tau == 0.0 || a == nullptr) return f;
  return f - tau * ((*a) * f);
}

std::vector<double> block_norms_of(const BlockLayout& layout, const Vector& w) {
  std::vector<double> norms(layout.players());
  for (int i = 0; i < layout.players(); ++i) {
    norms[i] = w.segment(layout.offset(i), layout.dim(i)).norm();
  }
  return norms;
}

void append_record(SolverTrace& trace, const BlockLayout& layout, int k, const Vector& w,
                   double residual, std::optional<double> skew_err = std::nullopt,
                   std::optional<std::vector<double>> sec_errs = std::nullopt) {
  TraceRecord rec;
  rec.k = k;
  rec.residual = residual;
  rec.block_norms = block_norms_of(layout, w);
  rec.skew_error = skew_err;
  rec.secant_errors = std::move(sec_errs);
  trace.records.push_back(std::move(rec));
}

void finish(SolverTrace& trace, const BlockLayout& layout, int k, const Vector& w,
            SolverStatus status) {
  trace.status = status;
  trace.iterations = k;
  trace.final_point = JointPoint(layout, w);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("SolverConfig: eta must be > 0");
  if (tau < 0.0) throw std::invalid_argument("SolverConfig: tau must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  if (!(residual_tol > 0.0)) throw std::invalid_argument("SolverConfig: residual_tol must be > 0");
  if (record_every < 1) throw std::invalid_argument("SolverConfig: record_every must be >= 1");
  if (!(divergence_tol > 0.0)) {
    throw std::invalid_argument("SolverConfig: divergence_tol must be > 0");
  }
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged: return "converged";
    case SolverStatus::kMaxIter: return "max_iter";
    case SolverStatus::kDiverged: return "diverged";
  }
  return "unknown";
}

SolverTrace run_multilrsga(const Game& g, const JointPoint& w0, const SolverConfig& cfg,
                           const RunDiagnostics* diagnostics, SecantState* final_secant) {
  cfg.validate();
  if (w0.layout != g.layout()) throw std::invalid_argument("run_multilrsga: layout mismatch");
  const BlockLayout& layout = g.layout();

  SecantState state = init_secant(g, w0, cfg.secant_init);
  std::optional<SkewCorrection> a_star;
  if (diagnostics != nullptr && diagnostics->record_skew_error) {
    a_star = exact_skew(g, diagnostics->w_star);
  }

  SolverTrace trace;
  Vector w = w0.values;
  Vector f = eval_gradient(g, w, 0, "run_multilrsga");

  for (int k = 0;; ++k) {
    const double residual = f.norm();
    const SkewCorrection correction = build_skew_correction(state);

    const bool terminal = residual <= cfg.residual_tol || residual > cfg.divergence_tol ||
                          k == cfg.max_iter;
    if (terminal || k % cfg.record_every == 0) {
      std::optional<double> skew_err;
      std::optional<std::vector<double>> sec_errs;
      if (a_star.has_value()) skew_err = skew_error(correction, *a_star);
      if (diagnostics != nullptr && diagnostics->record_secant_errors) {
        sec_errs = secant_error(state, g, diagnostics->w_star);
      }
      append_record(trace, layout, k, w, residual, skew_err, std::move(sec_errs));
    }
    if (residual <= cfg.residual_tol) {
      finish(trace, layout, k, w, SolverStatus::kConverged);
      break;
    }
    if (residual > cfg.divergence_tol) {
      finish(trace, layout, k, w, SolverStatus::kDiverged);
      break;
    }
    if (k == cfg.max_iter) {
      finish(trace, layout, k, w, SolverStatus::kMaxIter);
      break;
    }

    const Vector direction = step_direction(f, cfg.tau, &correction.full());
    const Vector w_next = w - cfg.eta * direction;
    const Vector f_next = eval_gradient(g, w_next, k + 1, "run_multilrsga");

    const double skip = cfg.skip_tol >= 0.0 ? cfg.skip_tol : default_skip_tol(w);
    broyden_update(state, w_next - w, f, f_next, skip);

    w = w_next;
    f = f_next;
  }
  if (final_secant != nullptr) *final_secant = std::move(state);
  return trace;
}

SolverTrace run_gradient_descent(const Game& g, const JointPoint& w0, const SolverConfig& cfg) {
  cfg.validate();
  if (w0.layout != g.layout()) {
    throw std::invalid_argument("run_gradient_descent: layout mismatch");
  }
  const BlockLayout& layout = g.layout();

  SolverTrace trace;
  Vector w = w0.values;
  Vector f = eval_gradient(g, w, 0, "run_gradient_descent");

  for (int k = 0;; ++k) {
    const double residual = f.norm();
    const bool terminal = residual <= cfg.residual_tol || residual > cfg.divergence_tol ||
                          k == cfg.max_iter;
    if (terminal || k % cfg.record_every == 0) append_record(trace, layout, k, w, residual);
    if (residual <= cfg.residual_tol) {
      finish(trace, layout, k, w, SolverStatus::kConverged);
      break;
    }
    if (residual > cfg.divergence_tol) {
      finish(trace, layout, k, w, SolverStatus::kDiverged);
      break;
    }
    if (k == cfg.max_iter) {
      finish(trace, layout, k, w, SolverStatus::kMaxIter);
      break;
    }

    const Vector direction = step_direction(f, 0.0, nullptr);
    w = w - cfg.eta * direction;
    f = eval_gradient(g, w, k + 1, "run_gradient_descent");
  }
  return trace;
}

SolverTrace run_exact_sga(const Game& g, const JointPoint& w0, const SolverConfig& cfg) {
  cfg.validate();
  if (w0.layout != g.layout()) throw std::invalid_argument("run_exact_sga: layout mismatch");
  const BlockLayout& layout = g.layout();

  SolverTrace trace;
  Vector w = w0.values;
  Vector f = eval_gradient(g, w, 0, "run_exact_sga");

  for (int k = 0;; ++k) {
    const double residual = f.norm();
    const bool terminal = residual <= cfg.residual_tol || residual > cfg.divergence_tol ||
                          k == cfg.max_iter;
    if (terminal || k % cfg.record_every == 0) append_record(trace, layout, k, w, residual);
    if (residual <= cfg.residual_tol) {
      finish(trace, layout, k, w, SolverStatus::kConverged);
      break;
    }
    if (residual > cfg.divergence_tol) {
      finish(trace, layout, k, w, SolverStatus::kDiverged);
      break;
    }
    if (k == cfg.max_iter) {
      finish(trace, layout, k, w, SolverStatus::kMaxIter);
      break;
    }

    Vector direction;
    if (cfg.tau == 0.0) {
      direction = step_direction(f, 0.0, nullptr);
    } else {
      const SkewCorrection a = exact_skew(g, JointPoint(layout, w));
      direction = step_direction(f, cfg.tau, &a.full());
    }
    w = w - cfg.eta * direction;
    f = eval_gradient(g, w, k + 1, "run_exact_sga");
  }
  return trace;
}

Vector multilrsga_direction_matrix(const SecantState& state, const Vector& f, double tau) {
  if (tau == 0.0) return f;
  const SkewCorrection correction = build_skew_correction(state);
  return step_direction(f, tau, &correction.full());
}

Vector multilrsga_direction_blockwise(const SecantState& state, const Vector& f, double tau) {
  if (tau == 0.0) return f;
  const BlockLayout& layout = state.layout;
  Vector out(layout.total());
  for (int i = 0; i < layout.players(); ++i) {
    Vector di = f.segment(layout.offset(i), layout.dim(i));
    for (int j = 0; j < layout.players(); ++j) {
      if (j == i) continue;
      const Matrix mi_j = block_get(state.matrices[i], layout, i, j);
      const Matrix mj_i = block_get(state.matrices[j], layout, j, i);
      const Vector fj = f.segment(layout.offset(j), layout.dim(j));
      di -= (0.5 * tau) * ((mi_j - mj_i.transpose()) * fj);
    }
    out.segment(layout.offset(i), layout.dim(i)) = di;
  }
  return out;
}

FrozenMapReport frozen_map_analysis(const Game& g, const JointPoint& w_star, double eta,
                                    double tau, double lf_estimate,
                                    const FrozenMapOptions& opts) {
  if (w_star.layout != g.layout()) {
    throw std::invalid_argument("frozen_map_analysis: layout mismatch");
  }
  const double stationarity = game_gradient(g, w_star).norm();
  if (stationarity > 1e-8) {
    std::ostringstream os;
    os << "frozen_map_analysis: w_star is not stationary (||F|| = " << stationarity << ")";
    throw std::invalid_argument(os.str());
  }

  const HessianMode mode =
      g.has_analytic_hessian() ? HessianMode::kAnalytic : HessianMode::kFiniteDifference;
  const Matrix h = game_hessian(g, w_star, mode, opts.fd_step).full;
  const Matrix a = exact_skew(g, w_star, opts.fd_step).full();
  const int d = g.dimension();
  const Matrix dt = Matrix::Identity(d, d) - eta * ((Matrix::Identity(d, d) - tau * a) * h);

  FrozenMapReport report;
  report.jacobian_norm = spectral_norm(dt);
  report.spectral_radius =
      Eigen::EigenSolver<Matrix>(dt, /*computeEigenvectors=*/false)
          .eigenvalues()
          .cwiseAbs()
          .maxCoeff();

  if (lf_estimate > 0.0) {
    report.lf_estimate = lf_estimate;
  } else {
    // Sample max ||H(w)||_2 over a seeded cloud in a ball around w*.
    std::mt19937_64 rng(opts.lf_seed);
    double lf = spectral_norm(h);
    for (int s = 0; s < opts.lf_samples; ++s) {
      Vector u(d);
      for (int p = 0; p < d; ++p) u[p] = normal_unit(rng);
      u.normalize();
      const double r = opts.lf_radius * std::pow(uniform_unit(rng), 1.0 / d);
      const JointPoint sample(g.layout(), Vector(w_star.values + r * u));
      lf = std::max(lf, spectral_norm(game_hessian(g, sample, mode, opts.fd_step).full));
    }
    report.lf_estimate = lf;
  }
  report.step_condition_lhs = eta * tau * (g.players() - 1) * report.lf_estimate;
  report.contractive = report.jacobian_norm < 1.0;
  report.step_condition_ok = report.step_condition_lhs < 1.0;
  return report;
}

RateFit estimate_linear_rate(const SolverTrace& trace, int burn_in) {
  if (burn_in < 0) throw std::invalid_argument("estimate_linear_rate: burn_in must be >= 0");
  std::vector<double> ks;
  std::vector<double> logs;
  for (const TraceRecord& rec : trace.records) {
    if (rec.k >= burn_in && rec.residual > 0.0) {
      ks.push_back(static_cast<double>(rec.k));
      logs.push_back(std::log(rec.residual));
    }
  }
  const std::size_t n = ks.size();
  if (n < 10) {
    std::ostringstream os;
    os << "estimate_linear_rate: need at least 10 positive-residual records after burn-in, got "
       << n;
    throw std::invalid_argument(os.str());
  }

  double k_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k_mean += ks[i];
    y_mean += logs[i];
  }
  k_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (ks[i] - k_mean) * (ks[i] - k_mean);
    sxy += (ks[i] - k_mean) * (logs[i] - y_mean);
  }
  const double slope = sxy / sxx;
  const double intercept = y_mean - slope * k_mean;

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit = slope * ks[i] + intercept;
    ss_res += (logs[i] - fit) * (logs[i] - fit);
    ss_tot += (logs[i] - y_mean) * (logs[i] - y_mean);
  }

  RateFit out;
  out.q_hat = std::exp(slope);
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

}  // namespace mlrsga
