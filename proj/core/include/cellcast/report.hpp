#pragma once

#include "cellcast/eval.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cellcast {

enum class ReportTable { pooled_rmsle, stability_std };

/// Rows: one per step, then `mean`. Columns: `step`, then one per model.
/// Cells of failed models are `NA`.
std::string table_csv(const EvalReport& report, ReportTable table);

/// `model,series_id,step,value` long format.
std::string per_series_csv(const EvalReport& report);

/// Provenance sidecar: report.provenance plus per-model status.
std::string provenance_json(const EvalReport& report);

/// Static line chart of one table (steps on x, one polyline per model).
std::string line_plot_svg(const EvalReport& report, ReportTable table);

/// Writes rmsle_by_step.csv, stability_std_by_step.csv,
/// per_series_rmsle.csv, provenance.json and the two .svg plots into
/// `dir` (created if missing). Returns the paths written.
std::vector<std::filesystem::path> write_report(const EvalReport& report, const std::filesystem::path& dir);

} // namespace cellcast
