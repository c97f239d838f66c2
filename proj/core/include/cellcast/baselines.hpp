#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cellcast {

/// forecast[h] = train[n - season + ((h - 1) mod season)] (0-based train).
std::vector<double> seasonal_naive(std::span<const double> train, std::size_t season, std::size_t horizon);

struct HoltWintersConfig {
    std::size_t season = 7;
    double alpha = 0.3;
    double beta = 0.05;
    double gamma = 0.1;

    void validate() const;
    bool operator==(const HoltWintersConfig&) const = default;
};

/// Additive Holt-Winters with fixed coefficients.
///
/// Initial state from the first two seasons: level = mean(season 1),
/// trend = (mean(season 2) - mean(season 1)) / season, seasonal[j] =
/// train[j] - level. The smoothing pass then runs over every observation
/// t = 0..n-1:
///   level' = alpha (y - s[t mod m]) + (1 - alpha)(level + trend)
///   trend' = beta (level' - level) + (1 - beta) trend
///   s[t mod m] = gamma (y - level') + (1 - gamma) s[t mod m]
/// and forecast[h] = level + h trend + s[(n + h - 1) mod m]. Output is not
/// clamped.
std::vector<double> holt_winters(std::span<const double> train, const HoltWintersConfig& cfg, std::size_t horizon);

/// One-step-ahead errors y_t - (level + trend + s[t mod m]) of the
/// smoothing pass, in order.
std::vector<double> holt_winters_residuals(std::span<const double> train, const HoltWintersConfig& cfg);

/// Mean of the whole training range, repeated over the horizon.
std::vector<double> constant_mean(std::span<const double> train, std::size_t horizon);

} // namespace cellcast
