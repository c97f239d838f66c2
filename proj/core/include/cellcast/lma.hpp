#pragma once

#include "cellcast/matrix.hpp"
#include "cellcast/panel.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cellcast {

enum class FeatureKind { mean, std };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

/// Local moving average settings. `context` is the training input length
/// and `prediction` the prediction length; context >= prediction >= 1.
struct LmaConfig {
    std::size_t context = 62;
    std::size_t prediction = 31;
    std::vector<FeatureKind> features{FeatureKind::mean, FeatureKind::std};
    bool standardize = true;

    void validate() const;
    void validate_for(std::size_t series_length) const;
    bool operator==(const LmaConfig&) const = default;
};

/// Mean or population standard deviation (divides by the window length).
/// Both are two-pass, left-to-right sums.
double feature_value(std::span<const double> window, FeatureKind kind);

/// 1-based inclusive window [start, start + length - 1] inside [1, n].
struct LmaWindow {
    std::size_t start = 0;
    std::size_t length = 0;
    bool operator==(const LmaWindow&) const = default;
};

/// Window used for output index i (1-based, 1 <= i <= n + pl):
///   i < pl                                -> (1, cl)
///   pl <= i < n and n - i - 1 < pl        -> (n - cl + 1, cl)
///   pl <= i < n otherwise                 -> (clamp(i - pl + 1, 1, n - cl + 1), cl)
///   i >= n                                -> (n - pl + 1, pl)
LmaWindow lma_window(std::size_t i, std::size_t n, std::size_t cl, std::size_t pl);

/// One channel per configured feature, each of length n + pl.
std::vector<std::vector<double>> lma_features(std::span<const double> z, const LmaConfig& cfg);

/// Which covariate channels a model consumes. No LMA config means the
/// plain autoregressive model (optionally with the day-of-week channel).
struct CovariateSpec {
    std::optional<LmaConfig> lma;
    bool day_of_week = false;

    std::size_t channel_count() const {
        return (lma ? lma->features.size() : 0) + (day_of_week ? 1 : 0);
    }
    bool operator==(const CovariateSpec&) const = default;
};

/// Per-series covariate channels over the training range plus the horizon.
class CovariatePanel {
public:
    struct Standardization {
        double mean = 0.0;
        double stddev = 0.0;
    };

    std::size_t series_count() const { return ids_.size(); }
    std::size_t channel_count() const { return labels_.size(); }
    /// n + pl.
    std::size_t length() const { return length_; }
    std::size_t train_length() const { return train_length_; }
    std::size_t horizon() const { return length_ - train_length_; }

    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const CovariateSpec& spec() const { return spec_; }

    std::span<const double> channel(std::size_t series, std::size_t k) const { return channels_[series][k]; }
    /// Empty unless LMA standardization was applied; one entry per LMA channel.
    const std::vector<Standardization>& standardization(std::size_t series) const { return scaling_[series]; }

    /// Steps [first, first + count) of series `series`, step-major with
    /// channel_count() columns (0-based step indices).
    Matrix window(std::size_t series, std::size_t first, std::size_t count) const;

private:
    friend CovariatePanel build_covariates(const SeriesPanel&, const LmaConfig&);
    friend CovariatePanel make_covariates(const SeriesPanel&, const CovariateSpec&, std::size_t);
    friend void add_day_of_week(CovariatePanel&, Date);

    std::vector<std::string> ids_;
    std::vector<std::string> labels_;
    CovariateSpec spec_;
    std::size_t length_ = 0;
    std::size_t train_length_ = 0;
    std::vector<std::vector<std::vector<double>>> channels_;
    std::vector<std::vector<Standardization>> scaling_;
};

/// Applies lma_features to every series; when cfg.standardize is set each
/// channel is centred and scaled by its own first-n mean and population
/// std (zero-variance channels are only centred).
CovariatePanel build_covariates(const SeriesPanel& panel, const LmaConfig& cfg);

/// Appends a `dow` channel: weekday (Mon=0..Sun=6) mapped to [-0.5, 0.5].
void add_day_of_week(CovariatePanel& covariates, Date start);

/// Covariates for a model: LMA channels (if any) followed by day-of-week
/// (if enabled). `horizon` is used only when spec.lma is empty.
CovariatePanel make_covariates(const SeriesPanel& panel, const CovariateSpec& spec, std::size_t horizon);

/// `series_id,channel,t,value` with 1-based t.
void write_covariates(const CovariatePanel& covariates, const std::filesystem::path& path);

} // namespace cellcast
