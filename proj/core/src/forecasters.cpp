#include "cellcast/forecasters.hpp"

#include "cellcast/config_json.hpp"
#include "cellcast/error.hpp"

#include <algorithm>

namespace cellcast {

namespace {

template <class Fn>
Matrix per_series(const SeriesPanel& train, std::size_t horizon, Fn&& fn) {
    Matrix out(train.series_count(), horizon);
    for (std::size_t i = 0; i < train.series_count(); ++i) {
        const auto values = fn(train.series(i));
        std::copy(values.begin(), values.end(), out.row(i).begin());
    }
    return out;
}

} // namespace

Matrix SeasonalNaiveForecaster::forecast(const SeriesPanel& train, std::size_t horizon, std::uint64_t) {
    return per_series(train, horizon, [&](auto z) { return seasonal_naive(z, season_, horizon); });
}

nlohmann::json SeasonalNaiveForecaster::describe() const {
    return {{"season", season_}};
}

Matrix HoltWintersForecaster::forecast(const SeriesPanel& train, std::size_t horizon, std::uint64_t) {
    return per_series(train, horizon, [&](auto z) { return holt_winters(z, cfg_, horizon); });
}

nlohmann::json HoltWintersForecaster::describe() const {
    return {{"season", cfg_.season}, {"alpha", cfg_.alpha}, {"beta", cfg_.beta}, {"gamma", cfg_.gamma}};
}

Matrix ConstantMeanForecaster::forecast(const SeriesPanel& train, std::size_t horizon, std::uint64_t) {
    return per_series(train, horizon, [&](auto z) { return constant_mean(z, horizon); });
}

DeepArForecaster::DeepArForecaster(std::string name, TrainConfig train, CovariateSpec covariates,
                                   std::size_t samples, PointStatistic statistic)
    : name_(std::move(name)), train_(train), covariates_(std::move(covariates)), samples_(samples),
      statistic_(statistic) {
    train_.validate();
    if (covariates_.lma) covariates_.lma->validate();
    if (samples_ < 1) throw ValidationError("sample count must be >= 1");
}

Matrix DeepArForecaster::forecast(const SeriesPanel& train_panel, std::size_t horizon, std::uint64_t seed) {
    if (horizon > train_.horizon) {
        throw ValidationError(name_ + ": requested horizon " + std::to_string(horizon) +
                              " exceeds the trained horizon " + std::to_string(train_.horizon));
    }
    const CovariatePanel cov = make_covariates(train_panel, covariates_, train_.horizon);
    model_ = train(train_panel, cov, train_);
    const auto forecasts = forecast_panel(*model_, train_panel, cov, horizon, samples_, seed);
    Matrix out(train_panel.series_count(), horizon);
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const auto point = point_forecast(forecasts[i], statistic_);
        std::copy(point.begin(), point.end(), out.row(i).begin());
    }
    return out;
}

nlohmann::json DeepArForecaster::describe() const {
    nlohmann::json j = {{"train", to_json(train_)},
                        {"covariates", to_json(covariates_)},
                        {"samples", samples_},
                        {"point_statistic", std::string(to_string(statistic_))},
                        {"likelihood", "gaussian"}};
    if (model_) j["epoch_nll"] = model_->epoch_nll;
    return j;
}

} // namespace cellcast
