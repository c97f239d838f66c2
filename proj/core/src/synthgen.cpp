#include "cellcast/synthgen.hpp"

#include "cellcast/error.hpp"
#include "cellcast/parallel.hpp"
#include "cellcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace cellcast {

namespace {

enum Stream : std::uint64_t { kShape = 0, kBurst = 1, kNoise = 2 };

void check_range(const Range& r, const char* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
        throw ValidationError(std::string("synth.") + name + ": range must be finite with lo <= hi");
    }
}

} // namespace

void SynthConfig::validate() const {
    if (series < 1) throw ValidationError("synth.series must be >= 1");
    if (days < 2) throw ValidationError("synth.days must be >= 2");
    if (!(period >= 1.0)) throw ValidationError("synth.period must be >= 1");
    if (!(base_level >= 0.0)) throw ValidationError("synth.base_level must be >= 0");
    if (!(burst_rate >= 0.0)) throw ValidationError("synth.burst_rate must be >= 0");
    if (!(burst_scale >= 0.0)) throw ValidationError("synth.burst_scale must be >= 0");
    if (!(noise_sigma >= 0.0)) throw ValidationError("synth.noise_sigma must be >= 0");
    check_range(trend_slope, "trend_slope");
    check_range(amplitude, "amplitude");
    parse_date(start_date);
}

SeriesShape series_shape(const SynthConfig& cfg, std::size_t index) {
    Rng rng(derive_seed(derive_seed(cfg.seed, index), kShape));
    SeriesShape shape;
    shape.trend_slope = rng.uniform(cfg.trend_slope.lo, cfg.trend_slope.hi);
    shape.amplitude = rng.uniform(cfg.amplitude.lo, cfg.amplitude.hi);
    shape.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return shape;
}

std::vector<double> generate_series(const SynthConfig& cfg, std::size_t index) {
    const std::uint64_t series_seed = derive_seed(cfg.seed, index);
    const SeriesShape shape = series_shape(cfg, index);
    Rng bursts(derive_seed(series_seed, kBurst));
    Rng noise(derive_seed(series_seed, kNoise));

    std::vector<double> out(cfg.days);
    for (std::size_t k = 0; k < cfg.days; ++k) {
        const double t = static_cast<double>(k + 1);
        double burst = 0.0;
        const auto arrivals = bursts.poisson(cfg.burst_rate);
        for (std::uint64_t b = 0; b < arrivals; ++b) burst += bursts.exponential(cfg.burst_scale);
        const double e = cfg.noise_sigma > 0.0 ? noise.normal(0.0, cfg.noise_sigma) : 0.0;
        const double y = cfg.base_level + shape.trend_slope * t +
                         shape.amplitude * std::sin(2.0 * std::numbers::pi * t / cfg.period + shape.phase) + burst;
        out[k] = std::max(0.0, y + e);
    }
    return out;
}

SeriesPanel generate_panel(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<std::string> ids(cfg.series);
    std::vector<std::vector<double>> values(cfg.series);
    parallel_for(cfg.series, [&](std::size_t i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "cell_%04zu", i);
        ids[i] = buf;
        values[i] = generate_series(cfg, i);
    });
    return SeriesPanel::create(std::move(ids), parse_date(cfg.start_date), std::move(values));
}

} // namespace cellcast
