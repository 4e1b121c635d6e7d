#include "mlrsga/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mlrsga {

namespace {

constexpr std::size_t kMaxChartPoints = 2000;

std::vector<double> nice_linear_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 0.5 * step; t += step) {
    ticks.push_back(t);
  }
  return ticks;
}

std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const SolverTrace& trace) {
  const bool with_skew = !trace.records.empty() && trace.records.front().skew_error.has_value();
  const bool with_secant =
      !trace.records.empty() && trace.records.front().secant_errors.has_value();
  const std::size_t players =
      trace.records.empty() ? 0 : trace.records.front().block_norms.size();

  os << "k,residual";
  for (std::size_t i = 1; i <= players; ++i) os << ",norm_x" << i;
  if (with_skew) os << ",skew_err";
  if (with_secant) {
    for (std::size_t i = 1; i <= players; ++i) os << ",sec_err_" << i;
  }
  os << "\n";

  for (const TraceRecord& rec : trace.records) {
    os << rec.k << "," << format_double(rec.residual);
    for (const double n : rec.block_norms) os << "," << format_double(n);
    if (with_skew) os << "," << format_double(rec.skew_error.value_or(0.0));
    if (with_secant) {
      for (const double e : *rec.secant_errors) os << "," << format_double(e);
    }
    os << "\n";
  }
}

nlohmann::json solver_config_to_json(const SolverConfig& cfg) {
  const char* init = "random";
  if (cfg.secant_init.strategy == SecantInit::kZero) init = "zero";
  if (cfg.secant_init.strategy == SecantInit::kFiniteDifference) init = "fd";
  return nlohmann::json{
      {"eta", cfg.eta},
      {"tau", cfg.tau},
      {"max_iter", cfg.max_iter},
      {"residual_tol", cfg.residual_tol},
      {"record_every", cfg.record_every},
      {"skip_tol", cfg.skip_tol},
      {"divergence_tol", cfg.divergence_tol},
      {"secant_init", init},
      {"secant_seed", cfg.secant_init.seed},
      {"secant_scale", cfg.secant_init.scale},
  };
}

nlohmann::json comparison_to_json(const ComparisonReport& report) {
  nlohmann::json solvers = nlohmann::json::object();
  for (const SolverComparison& leg : report.solvers) {
    nlohmann::json entry{
        {"status", to_string(leg.trace.status)},
        {"iterations", leg.trace.iterations},
        {"final_residual", leg.trace.final_residual()},
        {"oscillation_sign_changes", leg.oscillation_sign_changes},
    };
    if (leg.iterations_to_tolerance.has_value()) {
      entry["iterations_to_tolerance"] = *leg.iterations_to_tolerance;
    }
    if (leg.rate.has_value()) {
      entry["q_hat"] = leg.rate->q_hat;
      entry["r_squared"] = leg.rate->r_squared;
    }
    solvers[leg.solver] = std::move(entry);
  }
  return nlohmann::json{{"solvers", std::move(solvers)},
                        {"rate_burn_in", report.rate_burn_in},
                        {"oscillation_burn_in", report.oscillation_burn_in}};
}

nlohmann::json report_to_json(const ComparisonReport& report, const RunConfig& cfg,
                              const std::string& game_note) {
  nlohmann::json out = comparison_to_json(report);
  out["game"] = cfg.game;
  out["game_note"] = game_note;
  out["seed"] = cfg.seed;
  nlohmann::json configs = nlohmann::json::object();
  for (const SolverComparison& leg : report.solvers) {
    configs[leg.solver] = solver_config_to_json(cfg.solver_config(leg.solver));
  }
  out["configs"] = std::move(configs);
  return out;
}

nlohmann::json secant_state_to_json(const SecantState& state) {
  nlohmann::json matrices = nlohmann::json::array();
  for (const Matrix& m : state.matrices) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    matrices.push_back(nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()},
                                      {"entries", std::move(rows)}});
  }
  return nlohmann::json{{"dims", state.layout.dims()},
                        {"matrices", std::move(matrices)},
                        {"last_update_skipped", state.last_update_skipped}};
}

void write_line_chart_svg(std::ostream& os, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<ChartSeries>& series, bool log_y) {
  const int width = 760, height = 480;
  const int ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  // Data ranges; log-scale drops non-positive y values.
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const ChartSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = s.y[i];
      if (log_y && !(y > 0.0)) continue;
      const double yv = log_y ? std::log10(y) : y;
      if (!any) {
        xmin = xmax = s.x[i];
        ymin = ymax = yv;
        any = true;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, yv);
        ymax = std::max(ymax, yv);
      }
    }
  }
  if (!any) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
  const auto py = [&](double yv) { return mt + ph * (1.0 - (yv - ymin) / (ymax - ymin)); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
     << " font-size=\"15\">" << title << "</text>\n";

  // Axes frame.
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // Y ticks: decades when log scale, nice numbers otherwise.
  std::vector<double> yticks;
  if (log_y) {
    for (double t = std::ceil(ymin); t <= std::floor(ymax) + 1e-12; t += 1.0) yticks.push_back(t);
    if (yticks.empty()) yticks = {ymin, ymax};
  } else {
    yticks = nice_linear_ticks(ymin, ymax);
  }
  for (const double t : yticks) {
    if (t < ymin - 1e-12 || t > ymax + 1e-12) continue;
    const double y = py(t);
    os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << width - mr << "\" y2=\"" << y
       << "\" stroke=\"#ddd\"/>\n";
    std::string label = log_y ? ("1e" + short_number(t)) : short_number(t);
    os << "<text x=\"" << ml - 6 << "\" y=\"" << y + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label
       << "</text>\n";
  }
  for (const double t : nice_linear_ticks(xmin, xmax)) {
    if (t < xmin - 1e-12 || t > xmax + 1e-12) continue;
    const double x = px(t);
    os << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << height - mb
       << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << height - mb + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << short_number(t) << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << mt + ph / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
     << mt + ph / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const ChartSeries& s = series[si];
    const char* color = kColors[si % 5];
    const std::size_t n = s.x.size();
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxChartPoints);
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      std::size_t idx = std::min(i, n - 1);
      const double y = s.y[idx];
      if (log_y && !(y > 0.0)) continue;
      os << px(s.x[idx]) << "," << py(log_y ? std::log10(y) : y) << " ";
    }
    if (n > 0) {
      const double y = s.y[n - 1];
      if (!log_y || y > 0.0) os << px(s.x[n - 1]) << "," << py(log_y ? std::log10(y) : y);
    }
    os << "\"/>\n";
    os << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 18 + 16 * si
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
       << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace mlrsga
