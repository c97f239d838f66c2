#pragma once

#include "cellcast/matrix.hpp"
#include "cellcast/panel.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cellcast {

/// sqrt(mean over all cells of (ln(pred + 1) - ln(actual + 1))^2).
/// Throws on shape mismatch, empty input, or a negative / non-finite cell.
double rmsle_pooled(MatrixView actual, MatrixView predicted);

/// rmsle_pooled applied to each row.
std::vector<double> rmsle_per_series(MatrixView actual, MatrixView predicted);

/// Population standard deviation of per-series RMSLE values.
double stability_std(std::span<const double> per_series_rmsle);

/// A model that produces point forecasts for every series of a panel.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    /// N x horizon point forecasts, one row per series of `train`.
    virtual Matrix forecast(const SeriesPanel& train, std::size_t horizon, std::uint64_t seed) = 0;
    /// Configuration recorded in report provenance.
    virtual nlohmann::json describe() const { return nlohmann::json::object(); }
};

struct ModelReport {
    std::string name;
    bool ok = false;
    std::string error;
    /// Pooled RMSLE per evaluated step, then its mean.
    std::vector<double> pooled;
    double pooled_mean = 0.0;
    /// Stability std per evaluated step, then its mean.
    std::vector<double> stability;
    double stability_mean = 0.0;
    /// series x step per-series RMSLE.
    Matrix per_series;
    nlohmann::json description;
};

struct EvalReport {
    std::vector<std::size_t> steps;
    std::vector<std::string> series_ids;
    std::vector<ModelReport> models;
    nlohmann::json provenance = nlohmann::json::object();
};

/// Scores a point-forecast matrix against the first max(steps) test days.
/// Step s uses the first s forecast columns. Predictions are clamped at 0.
ModelReport score_forecast(const std::string& name, MatrixView actual, MatrixView predicted,
                           std::span<const std::size_t> steps);

/// Runs every model once at the largest step, truncates per step, and
/// scores. A model that throws is reported with ok = false; the rest
/// continue.
EvalReport sweep(std::span<const std::shared_ptr<Forecaster>> models, const SeriesPanel& panel,
                 const SplitSpec& split, std::span<const std::size_t> steps, std::uint64_t seed);

/// Steps first..last inclusive.
std::vector<std::size_t> step_range(std::size_t first, std::size_t last);

} // namespace cellcast
