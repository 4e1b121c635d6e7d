#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlrsga/config.hpp"
#include "mlrsga/experiments.hpp"
#include "mlrsga/secant.hpp"

namespace mlrsga {

/// Round-trippable decimal rendering used for every CSV number, so repeated
/// runs emit identical bytes.
std::string format_double(double v);

/// CSV schema: k,residual,norm_x1,...,norm_xh[,skew_err,sec_err_1..h].
/// The optional columns appear when the trace carries those diagnostics.
void write_trace_csv(std::ostream& os, const SolverTrace& trace);

nlohmann::json solver_config_to_json(const SolverConfig& cfg);
nlohmann::json comparison_to_json(const ComparisonReport& report);

/// report.json payload: game/seed echo plus one entry per solver with
/// status, iterations, rate fit, iterations to tolerance, and the
/// oscillation proxy.
nlohmann::json report_to_json(const ComparisonReport& report, const RunConfig& cfg,
                              const std::string& game_note);

/// Debug dump of the per-player secant matrices (shapes and entries).
nlohmann::json secant_state_to_json(const SecantState& state);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart. log_y switches the y axis to decades;
/// non-positive values are dropped from log-scale series. Long series are
/// thinned deterministically to bound the file size.
void write_line_chart_svg(std::ostream& os, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<ChartSeries>& series, bool log_y);

}  // namespace mlrsga
