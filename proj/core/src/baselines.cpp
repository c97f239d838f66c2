#include "cellcast/baselines.hpp"

#include "cellcast/error.hpp"

#include <string>

namespace cellcast {

namespace {

double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

struct HwState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;
    std::vector<double> residuals;
};

HwState smooth(std::span<const double> train, const HoltWintersConfig& cfg) {
    cfg.validate();
    const std::size_t m = cfg.season;
    if (train.size() < 2 * m) {
        throw ValidationError("holt_winters: training range of " + std::to_string(train.size()) +
                              " steps is shorter than two seasons (" + std::to_string(2 * m) + ")");
    }
    HwState st;
    const double first = mean_of(train.subspan(0, m));
    const double second = mean_of(train.subspan(m, m));
    st.level = first;
    st.trend = (second - first) / static_cast<double>(m);
    st.seasonal.resize(m);
    for (std::size_t j = 0; j < m; ++j) st.seasonal[j] = train[j] - first;

    st.residuals.reserve(train.size());
    for (std::size_t t = 0; t < train.size(); ++t) {
        double& s = st.seasonal[t % m];
        const double y = train[t];
        st.residuals.push_back(y - (st.level + st.trend + s));
        const double level = cfg.alpha * (y - s) + (1.0 - cfg.alpha) * (st.level + st.trend);
        st.trend = cfg.beta * (level - st.level) + (1.0 - cfg.beta) * st.trend;
        s = cfg.gamma * (y - level) + (1.0 - cfg.gamma) * s;
        st.level = level;
    }
    return st;
}

} // namespace

std::vector<double> seasonal_naive(std::span<const double> train, std::size_t season, std::size_t horizon) {
    if (season < 1) throw ValidationError("seasonal_naive: season must be >= 1");
    if (train.size() < season) {
        throw ValidationError("seasonal_naive: training range of " + std::to_string(train.size()) +
                              " steps is shorter than the season (" + std::to_string(season) + ")");
    }
    std::vector<double> out(horizon);
    const std::size_t base = train.size() - season;
    for (std::size_t h = 0; h < horizon; ++h) out[h] = train[base + h % season];
    return out;
}

void HoltWintersConfig::validate() const {
    if (season < 1) throw ValidationError("holt_winters.season must be >= 1");
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(alpha) || !unit(beta) || !unit(gamma)) {
        throw ValidationError("holt_winters coefficients alpha, beta, gamma must lie in [0, 1]");
    }
}

std::vector<double> holt_winters(std::span<const double> train, const HoltWintersConfig& cfg, std::size_t horizon) {
    const HwState st = smooth(train, cfg);
    const std::size_t n = train.size();
    std::vector<double> out(horizon);
    for (std::size_t h = 1; h <= horizon; ++h) {
        out[h - 1] = st.level + static_cast<double>(h) * st.trend + st.seasonal[(n + h - 1) % cfg.season];
    }
    return out;
}

std::vector<double> holt_winters_residuals(std::span<const double> train, const HoltWintersConfig& cfg) {
    return smooth(train, cfg).residuals;
}

std::vector<double> constant_mean(std::span<const double> train, std::size_t horizon) {
    if (train.empty()) throw ValidationError("constant_mean: empty training range");
    return std::vector<double>(horizon, mean_of(train));
}

} // namespace cellcast
