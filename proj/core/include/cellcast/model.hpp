#pragma once

#include "cellcast/lma.hpp"
#include "cellcast/lstm.hpp"
#include "cellcast/matrix.hpp"
#include "cellcast/network.hpp"
#include "cellcast/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace cellcast {

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct TrainConfig {
    std::size_t context_length = 62;
    std::size_t horizon = 31;
    std::size_t epochs = 15;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t hidden_size = 40;
    std::size_t num_layers = 2;
    double sigma_floor = 1e-6;
    /// Training windows drawn per series in every epoch.
    std::size_t windows_per_series = 32;
    std::uint64_t seed = 17;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct TrainedModel {
    NetworkParams params;
    TrainConfig train_config;
    CovariateSpec covariates;
    /// Mean window NLL of every epoch, in order.
    std::vector<double> epoch_nll;
    std::uint32_t format_version = kModelFormatVersion;

    bool operator==(const TrainedModel&) const = default;
};

/// Seeded initialization: weights uniform in [-0.08, 0.08] drawn in buffer
/// order from stream derive_seed(cfg.seed, 0); biases zero except the
/// forget-gate block, which is 1.
NetworkParams initialize_params(std::size_t input_size, const TrainConfig& cfg);

/// Maximum-likelihood training with Adam on teacher-forced windows of
/// context_length + horizon steps. Epoch e draws window offsets and the
/// shuffle from stream derive_seed(cfg.seed, e + 1).
TrainedModel train(const SeriesPanel& panel, const CovariatePanel& covariates, const TrainConfig& cfg);

/// S sampled trajectories (rows) over the horizon (columns), in data units.
struct Forecast {
    Matrix samples;
    double scale = 1.0;
    std::uint64_t seed = 0;

    std::size_t horizon() const { return samples.cols(); }
    bool operator==(const Forecast&) const = default;
};

/// Records which parameter object the encoder and decoder passes used.
struct SampleTrace {
    const NetworkParams* encoder = nullptr;
    const NetworkParams* decoder = nullptr;
};

/// State handed from the conditioning pass to the sampler.
struct EncodedSeries {
    HiddenState state;
    double last_value = 0.0;
    double scale = 1.0;
    Matrix horizon_covariates;
};

/// Runs the network over the last context_length conditioning steps.
/// `covariates` has conditioning.size() + horizon rows.
EncodedSeries encode_conditioning(const TrainedModel& model, std::span<const double> conditioning,
                                  MatrixView covariates, SampleTrace* trace = nullptr);

/// One ancestral trajectory from `encoded`, drawn from Rng(trajectory_seed).
/// Returns values in data units, clamped at 0.
std::vector<double> sample_trajectory(const TrainedModel& model, const EncodedSeries& encoded,
                                      std::uint64_t trajectory_seed, SampleTrace* trace = nullptr);

/// Trajectory s uses seed derive_seed(seed, s).
Forecast sample_forecast(const TrainedModel& model, std::span<const double> conditioning, MatrixView covariates,
                         std::size_t samples, std::uint64_t seed, SampleTrace* trace = nullptr);

/// Forecasts every series of the conditioning panel; series i uses seed
/// derive_seed(seed, i). Parallel over series.
std::vector<Forecast> forecast_panel(const TrainedModel& model, const SeriesPanel& conditioning,
                                     const CovariatePanel& covariates, std::size_t horizon, std::size_t samples,
                                     std::uint64_t seed);

enum class PointStatistic { median, mean };

std::string_view to_string(PointStatistic statistic);
PointStatistic parse_point_statistic(std::string_view text);

/// Per-step median (midpoint for even S) or mean across trajectories.
std::vector<double> point_forecast(const Forecast& forecast, PointStatistic statistic);

} // namespace cellcast
