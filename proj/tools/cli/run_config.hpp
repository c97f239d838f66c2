#pragma once

#include <cellcast/baselines.hpp>
#include <cellcast/lma.hpp>
#include <cellcast/model.hpp>
#include <cellcast/panel.hpp>
#include <cellcast/synthgen.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cellcast::cli {

struct ForecastSettings {
    std::size_t samples = 100;
    PointStatistic statistic = PointStatistic::median;
    std::uint64_t seed = 2018;
};

struct SweepSettings {
    std::size_t first_step = 15;
    std::size_t last_step = 31;
    std::vector<std::string> models{"lma_deepar", "deepar", "seasonal_naive", "holt_winters"};
    std::size_t naive_season = 7;
};

struct IoPaths {
    std::string panel = "panel.csv";
    std::string covariates = "covariates.csv";
    std::string model = "model.ccm";
    std::string forecast_samples = "forecast_samples.csv";
    std::string forecast_point = "forecast_point.csv";
    std::string report_dir = "report";
};

/// Every setting of a run. Sections: synth, split, lma, covariates, train,
/// forecast, holt_winters, sweep, io.
struct RunConfig {
    SynthConfig synth;
    SplitSpec split{182, 212};
    LmaConfig lma;
    bool use_lma = true;
    bool day_of_week = false;
    TrainConfig train;
    ForecastSettings forecast;
    HoltWintersConfig holt_winters;
    SweepSettings sweep;
    IoPaths io;

    /// Checks every section against its module's invariants and the
    /// cross-section constraints. Throws ValidationError naming the key.
    void validate() const;

    CovariateSpec covariate_spec(bool with_lma) const;

    nlohmann::json to_json() const;
    /// Strict: unknown sections or keys are errors.
    static RunConfig from_json(const nlohmann::json& doc);
};

/// Loads a JSON config file (an empty path yields the defaults), applies
/// `--set section.key=value` overrides and validates.
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);

/// Applies one `section.key=value` override to a config document. The
/// value is parsed as JSON when possible, otherwise taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// FNV-1a 64 of the canonical (sorted-key) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

} // namespace cellcast::cli
