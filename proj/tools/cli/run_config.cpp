#include "cli/run_config.hpp"

#include <cellcast/config_json.hpp>
#include <cellcast/error.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace cellcast::cli {

namespace {

using json = nlohmann::json;

const std::set<std::string> kModels{"lma_deepar", "deepar", "seasonal_naive", "holt_winters", "constant_mean"};
const std::set<std::string> kSections{"synth", "split", "lma", "covariates", "train",
                                      "forecast", "holt_winters", "sweep", "io"};

} // namespace

void RunConfig::validate() const {
    synth.validate();
    if (split.t0 <= 1) throw ValidationError("config key 'split.t0' must be > 1");
    if (split.last < split.t0) throw ValidationError("config key 'split.T' must be >= split.t0");
    lma.validate();
    train.validate();
    holt_winters.validate();
    if (lma.prediction != train.horizon) {
        throw ValidationError("config key 'lma.pl' (" + std::to_string(lma.prediction) +
                              ") must equal train.horizon (" + std::to_string(train.horizon) + ")");
    }
    if (lma.context > split.t0 - 1) {
        throw ValidationError("config key 'lma.cl' exceeds the training range of " + std::to_string(split.t0 - 1) +
                              " days");
    }
    if (forecast.samples < 1) throw ValidationError("config key 'forecast.samples' must be >= 1");
    if (sweep.first_step < 1 || sweep.last_step < sweep.first_step) {
        throw ValidationError("config keys 'sweep.first_step'/'sweep.last_step' must satisfy 1 <= first <= last");
    }
    if (sweep.naive_season < 1) throw ValidationError("config key 'sweep.naive_season' must be >= 1");
    if (sweep.models.empty()) throw ValidationError("config key 'sweep.models' must not be empty");
    std::set<std::string> seen;
    for (const auto& m : sweep.models) {
        if (!kModels.contains(m)) throw ValidationError("config key 'sweep.models': unknown model '" + m + "'");
        if (!seen.insert(m).second) throw ValidationError("config key 'sweep.models': duplicate model '" + m + "'");
    }
}

CovariateSpec RunConfig::covariate_spec(bool with_lma) const {
    CovariateSpec spec;
    if (with_lma) spec.lma = lma;
    spec.day_of_week = day_of_week;
    return spec;
}

json RunConfig::to_json() const {
    return {{"synth", cellcast::to_json(synth)},
            {"split", {{"t0", split.t0}, {"T", split.last}}},
            {"lma", cellcast::to_json(lma)},
            {"covariates", {{"use_lma", use_lma}, {"day_of_week", day_of_week}}},
            {"train", cellcast::to_json(train)},
            {"forecast",
             {{"samples", forecast.samples},
              {"statistic", std::string(to_string(forecast.statistic))},
              {"seed", forecast.seed}}},
            {"holt_winters",
             {{"season", holt_winters.season},
              {"alpha", holt_winters.alpha},
              {"beta", holt_winters.beta},
              {"gamma", holt_winters.gamma}}},
            {"sweep",
             {{"first_step", sweep.first_step},
              {"last_step", sweep.last_step},
              {"models", sweep.models},
              {"naive_season", sweep.naive_season}}},
            {"io",
             {{"panel", io.panel},
              {"covariates", io.covariates},
              {"model", io.model},
              {"forecast_samples", io.forecast_samples},
              {"forecast_point", io.forecast_point},
              {"report_dir", io.report_dir}}}};
}

RunConfig RunConfig::from_json(const json& doc) {
    RunConfig cfg;
    if (!doc.is_object()) throw ValidationError("config: top level must be an object");
    for (const auto& [section, body] : doc.items()) {
        if (!kSections.contains(section)) throw ValidationError("unknown config key '" + section + "'");
    }
    auto section = [&doc](const char* name) -> const json* {
        const auto it = doc.find(name);
        return it == doc.end() ? nullptr : &*it;
    };
    if (auto* j = section("synth")) read_json(*j, "synth", cfg.synth);
    if (auto* j = section("split")) read_object(*j, "split", {{"t0", set(cfg.split.t0)}, {"T", set(cfg.split.last)}});
    if (auto* j = section("lma")) read_json(*j, "lma", cfg.lma);
    if (auto* j = section("covariates")) {
        read_object(*j, "covariates", {{"use_lma", set(cfg.use_lma)}, {"day_of_week", set(cfg.day_of_week)}});
    }
    if (auto* j = section("train")) read_json(*j, "train", cfg.train);
    if (auto* j = section("forecast")) {
        read_object(*j, "forecast",
                    {{"samples", set(cfg.forecast.samples)},
                     {"seed", set(cfg.forecast.seed)},
                     {"statistic", [&cfg](const json& v) {
                          if (!v.is_string()) throw ValidationError("expected a string");
                          cfg.forecast.statistic = parse_point_statistic(v.get<std::string>());
                      }}});
    }
    if (auto* j = section("holt_winters")) {
        read_object(*j, "holt_winters",
                    {{"season", set(cfg.holt_winters.season)},
                     {"alpha", set(cfg.holt_winters.alpha)},
                     {"beta", set(cfg.holt_winters.beta)},
                     {"gamma", set(cfg.holt_winters.gamma)}});
    }
    if (auto* j = section("sweep")) {
        read_object(*j, "sweep",
                    {{"first_step", set(cfg.sweep.first_step)},
                     {"last_step", set(cfg.sweep.last_step)},
                     {"naive_season", set(cfg.sweep.naive_season)},
                     {"models", [&cfg](const json& v) {
                          if (!v.is_array()) throw ValidationError("expected a list of model names");
                          std::vector<std::string> names;
                          for (const auto& e : v) {
                              if (!e.is_string()) throw ValidationError("expected a list of model names");
                              names.push_back(e.get<std::string>());
                          }
                          cfg.sweep.models = std::move(names);
                      }}});
    }
    if (auto* j = section("io")) {
        read_object(*j, "io",
                    {{"panel", set(cfg.io.panel)},
                     {"covariates", set(cfg.io.covariates)},
                     {"model", set(cfg.io.model)},
                     {"forecast_samples", set(cfg.io.forecast_samples)},
                     {"forecast_point", set(cfg.io.forecast_point)},
                     {"report_dir", set(cfg.io.report_dir)}});
    }
    return cfg;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects section.key=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    const auto dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
        throw ValidationError("--set expects section.key=value, got '" + assignment + "'");
    }
    const std::string section = path.substr(0, dot);
    const std::string key = path.substr(dot + 1);
    if (!kSections.contains(section)) throw ValidationError("unknown config key '" + path + "'");
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    if (!doc.contains(section)) doc[section] = json::object();
    doc[section][key] = std::move(value);
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    json doc = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file '" + path.string() + "'");
        doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw ValidationError("config file '" + path.string() + "' is not valid JSON");
    }
    for (const auto& o : overrides) apply_override(doc, o);
    RunConfig cfg = RunConfig::from_json(doc);
    cfg.validate();
    return cfg;
}

std::string config_hash(const json& doc) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char b : doc.dump()) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace cellcast::cli
