#pragma once

#include "cellcast/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cellcast {

/// Closed interval [lo, hi] for per-series parameter draws. lo == hi pins
/// the value without consuming a different number of draws.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Parameters of the synthetic traffic generator
///   X_i(t) = max(0, base + a_i t + A_i sin(2 pi t / period + phi_i) + burst_i(t) + e_i(t)).
struct SynthConfig {
    std::size_t series = 50;
    std::size_t days = 212;
    double base_level = 1000.0;
    Range trend_slope{-1.0, 3.0};
    double period = 7.0;
    Range amplitude{50.0, 300.0};
    double burst_rate = 0.05;
    double burst_scale = 800.0;
    double noise_sigma = 40.0;
    std::uint64_t seed = 20170901;
    std::string start_date = "2017-09-01";

    void validate() const;
};

/// Per-series parameters drawn from the config ranges.
struct SeriesShape {
    double trend_slope = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
};

/// Stream layout: series seed = derive_seed(cfg.seed, i); under it, stream 0
/// draws the shape (slope, amplitude, phase), stream 1 the bursts, stream 2
/// the noise.
SeriesShape series_shape(const SynthConfig& cfg, std::size_t index);
std::vector<double> generate_series(const SynthConfig& cfg, std::size_t index);
/// Series ids are `cell_0000`, `cell_0001`, ...
SeriesPanel generate_panel(const SynthConfig& cfg);

} // namespace cellcast
