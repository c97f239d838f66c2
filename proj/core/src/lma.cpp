#include "cellcast/lma.hpp"

#include "cellcast/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

namespace cellcast {

std::string_view to_string(FeatureKind kind) {
    switch (kind) {
    case FeatureKind::mean: return "mean";
    case FeatureKind::std: return "std";
    }
    return "?";
}

FeatureKind parse_feature_kind(std::string_view text) {
    if (text == "mean") return FeatureKind::mean;
    if (text == "std") return FeatureKind::std;
    throw ValidationError("unknown LMA feature '" + std::string(text) + "' (expected mean or std)");
}

void LmaConfig::validate() const {
    if (prediction < 1) throw ValidationError("lma.pl must be >= 1");
    if (context < prediction) throw ValidationError("lma.cl must be >= lma.pl");
    if (features.empty()) throw ValidationError("lma.features must not be empty");
}

void LmaConfig::validate_for(std::size_t series_length) const {
    validate();
    if (series_length == 0) throw ValidationError("LMA input series is empty");
    if (context > series_length) {
        throw ValidationError("lma.cl = " + std::to_string(context) + " exceeds series length " +
                              std::to_string(series_length));
    }
}

double feature_value(std::span<const double> window, FeatureKind kind) {
    if (window.empty()) throw ValidationError("feature window is empty");
    const double len = static_cast<double>(window.size());
    double sum = 0.0;
    for (double v : window) sum += v;
    const double mean = sum / len;
    if (kind == FeatureKind::mean) return mean;
    double ss = 0.0;
    for (double v : window) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / len);
}

LmaWindow lma_window(std::size_t i, std::size_t n, std::size_t cl, std::size_t pl) {
    if (pl < 1 || cl < pl || cl > n) throw ValidationError("lma_window: require 1 <= pl <= cl <= n");
    if (i < 1 || i > n + pl) throw ValidationError("lma_window: index out of range");

    if (i < pl) return {1, cl};
    if (i < n) {
        // n - i - 1 < pl, written without unsigned underflow (i < n here).
        if (n - i < pl + 1) return {n - cl + 1, cl};
        const std::size_t lo = 1;
        const std::size_t hi = n - cl + 1;
        const std::size_t raw = i - pl + 1;
        return {std::clamp(raw, lo, hi), cl};
    }
    return {n - pl + 1, pl};
}

std::vector<std::vector<double>> lma_features(std::span<const double> z, const LmaConfig& cfg) {
    cfg.validate_for(z.size());
    const std::size_t n = z.size();
    const std::size_t total = n + cfg.prediction;
    std::vector<std::vector<double>> out(cfg.features.size(), std::vector<double>(total));
    for (std::size_t i = 1; i <= total; ++i) {
        const auto w = lma_window(i, n, cfg.context, cfg.prediction);
        const auto slice = z.subspan(w.start - 1, w.length);
        for (std::size_t k = 0; k < cfg.features.size(); ++k) out[k][i - 1] = feature_value(slice, cfg.features[k]);
    }
    return out;
}

Matrix CovariatePanel::window(std::size_t series, std::size_t first, std::size_t count) const {
    if (first + count > length_) throw ValidationError("covariate window exceeds covariate length");
    const std::size_t k_count = channel_count();
    Matrix out(count, k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        const auto& ch = channels_[series][k];
        for (std::size_t t = 0; t < count; ++t) out(t, k) = ch[first + t];
    }
    return out;
}

CovariatePanel build_covariates(const SeriesPanel& panel, const LmaConfig& cfg) {
    cfg.validate_for(panel.length());
    CovariatePanel out;
    out.ids_ = panel.ids();
    for (auto kind : cfg.features) out.labels_.emplace_back(to_string(kind));
    out.spec_.lma = cfg;
    out.train_length_ = panel.length();
    out.length_ = panel.length() + cfg.prediction;
    out.channels_.resize(panel.series_count());
    out.scaling_.resize(panel.series_count());

    const std::size_t n = panel.length();
    for (std::size_t i = 0; i < panel.series_count(); ++i) {
        auto channels = lma_features(panel.series(i), cfg);
        if (cfg.standardize) {
            for (auto& ch : channels) {
                const std::span<const double> train(ch.data(), n);
                const double mean = feature_value(train, FeatureKind::mean);
                const double sd = feature_value(train, FeatureKind::std);
                for (auto& v : ch) {
                    v -= mean;
                    if (sd > 0.0) v /= sd;
                }
                out.scaling_[i].push_back({mean, sd});
            }
        }
        out.channels_[i] = std::move(channels);
    }
    return out;
}

void add_day_of_week(CovariatePanel& covariates, Date start) {
    using namespace std::chrono;
    covariates.labels_.emplace_back("dow");
    covariates.spec_.day_of_week = true;
    for (auto& series : covariates.channels_) {
        std::vector<double> ch(covariates.length_);
        for (std::size_t t = 0; t < ch.size(); ++t) {
            const weekday wd{start + days(static_cast<long>(t))};
            ch[t] = static_cast<double>(wd.iso_encoding() - 1) / 6.0 - 0.5;
        }
        series.push_back(std::move(ch));
    }
}

CovariatePanel make_covariates(const SeriesPanel& panel, const CovariateSpec& spec, std::size_t horizon) {
    CovariatePanel out;
    if (spec.lma) {
        if (spec.lma->prediction != horizon) {
            throw ValidationError("lma.pl (" + std::to_string(spec.lma->prediction) +
                                  ") must equal the model horizon (" + std::to_string(horizon) + ")");
        }
        out = build_covariates(panel, *spec.lma);
    } else {
        if (horizon < 1) throw ValidationError("horizon must be >= 1");
        out.ids_ = panel.ids();
        out.train_length_ = panel.length();
        out.length_ = panel.length() + horizon;
        out.channels_.resize(panel.series_count());
        out.scaling_.resize(panel.series_count());
    }
    if (spec.day_of_week) add_day_of_week(out, panel.start_date());
    return out;
}

void write_covariates(const CovariatePanel& covariates, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "series_id,channel,t,value\n";
    for (std::size_t i = 0; i < covariates.series_count(); ++i) {
        for (std::size_t k = 0; k < covariates.channel_count(); ++k) {
            const auto ch = covariates.channel(i, k);
            for (std::size_t t = 0; t < ch.size(); ++t) {
                out << covariates.ids()[i] << ',' << covariates.labels()[k] << ',' << (t + 1) << ','
                    << format_double(ch[t]) << '\n';
            }
        }
    }
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace cellcast
