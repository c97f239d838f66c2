#pragma once

#include "cellcast/baselines.hpp"
#include "cellcast/eval.hpp"
#include "cellcast/model.hpp"

#include <optional>
#include <string>

namespace cellcast {

class SeasonalNaiveForecaster : public Forecaster {
public:
    explicit SeasonalNaiveForecaster(std::size_t season) : season_(season) {}
    std::string name() const override { return "seasonal_naive"; }
    Matrix forecast(const SeriesPanel& train, std::size_t horizon, std::uint64_t seed) override;
    nlohmann::json describe() const override;

private:
    std::size_t season_;
};

class HoltWintersForecaster : public Forecaster {
public:
    explicit HoltWintersForecaster(HoltWintersConfig cfg) : cfg_(cfg) {}
    std::string name() const override { return "holt_winters"; }
    Matrix forecast(const SeriesPanel& train, std::size_t horizon, std::uint64_t seed) override;
    nlohmann::json describe() const override;

private:
    HoltWintersConfig cfg_;
};

class ConstantMeanForecaster : public Forecaster {
public:
    std::string name() const override { return "constant_mean"; }
    Matrix forecast(const SeriesPanel& train, std::size_t horizon, std::uint64_t seed) override;
};

/// Trains on the conditioning panel, samples `samples` trajectories per
/// series and reduces them with `statistic`.
class DeepArForecaster : public Forecaster {
public:
    DeepArForecaster(std::string name, TrainConfig train, CovariateSpec covariates, std::size_t samples,
                     PointStatistic statistic);

    std::string name() const override { return name_; }
    Matrix forecast(const SeriesPanel& train, std::size_t horizon, std::uint64_t seed) override;
    nlohmann::json describe() const override;

    /// Model fitted by the most recent forecast() call.
    const std::optional<TrainedModel>& last_model() const { return model_; }

private:
    std::string name_;
    TrainConfig train_;
    CovariateSpec covariates_;
    std::size_t samples_;
    PointStatistic statistic_;
    std::optional<TrainedModel> model_;
};

} // namespace cellcast
