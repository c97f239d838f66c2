#include "cellcast/config_json.hpp"

#include "cellcast/error.hpp"

#include <functional>
#include <map>
#include <string>

namespace cellcast {

namespace {

using json = nlohmann::json;

Setter set_range(Range& r) {
    return [&r](const json& v) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ValidationError("expected [lo, hi]");
        }
        r = {v[0].get<double>(), v[1].get<double>()};
    };
}

} // namespace

void read_object(const json& j, std::string_view section, const std::map<std::string, Setter>& setters) {
    if (!j.is_object()) throw ValidationError(std::string(section) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        const std::string where = std::string(section) + "." + key;
        if (it == setters.end()) throw ValidationError("unknown config key '" + where + "'");
        try {
            it->second(value);
        } catch (const json::exception& e) {
            throw ValidationError("config key '" + where + "': " + e.what());
        } catch (const ValidationError& e) {
            const std::string msg = e.what();
            if (msg.rfind("unknown config key", 0) == 0) throw;
            throw ValidationError("config key '" + where + "': " + msg);
        }
    }
}

json to_json(const SynthConfig& c) {
    return {{"series", c.series},
            {"days", c.days},
            {"base_level", c.base_level},
            {"trend_slope", {c.trend_slope.lo, c.trend_slope.hi}},
            {"period", c.period},
            {"amplitude", {c.amplitude.lo, c.amplitude.hi}},
            {"burst_rate", c.burst_rate},
            {"burst_scale", c.burst_scale},
            {"noise_sigma", c.noise_sigma},
            {"seed", c.seed},
            {"start_date", c.start_date}};
}

json to_json(const LmaConfig& c) {
    json features = json::array();
    for (auto k : c.features) features.push_back(std::string(to_string(k)));
    return {{"cl", c.context}, {"pl", c.prediction}, {"features", features}, {"standardize", c.standardize}};
}

json to_json(const TrainConfig& c) {
    return {{"context_length", c.context_length}, {"horizon", c.horizon},
            {"epochs", c.epochs},                 {"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},         {"hidden_size", c.hidden_size},
            {"num_layers", c.num_layers},         {"sigma_floor", c.sigma_floor},
            {"windows_per_series", c.windows_per_series}, {"seed", c.seed}};
}

json to_json(const CovariateSpec& s) {
    return {{"lma", s.lma ? to_json(*s.lma) : json(nullptr)}, {"day_of_week", s.day_of_week}};
}

void read_json(const json& j, std::string_view section, SynthConfig& c) {
    read_object(j, section,
                {{"series", set(c.series)},
                 {"days", set(c.days)},
                 {"base_level", set(c.base_level)},
                 {"trend_slope", set_range(c.trend_slope)},
                 {"period", set(c.period)},
                 {"amplitude", set_range(c.amplitude)},
                 {"burst_rate", set(c.burst_rate)},
                 {"burst_scale", set(c.burst_scale)},
                 {"noise_sigma", set(c.noise_sigma)},
                 {"seed", set(c.seed)},
                 {"start_date", set(c.start_date)}});
}

void read_json(const json& j, std::string_view section, LmaConfig& c) {
    read_object(j, section,
                {{"cl", set(c.context)},
                 {"pl", set(c.prediction)},
                 {"standardize", set(c.standardize)},
                 {"features", [&c](const json& v) {
                      if (!v.is_array()) throw ValidationError("expected a list of feature names");
                      std::vector<FeatureKind> kinds;
                      for (const auto& e : v) {
                          if (!e.is_string()) throw ValidationError("expected a list of feature names");
                          kinds.push_back(parse_feature_kind(e.get<std::string>()));
                      }
                      c.features = std::move(kinds);
                  }}});
}

void read_json(const json& j, std::string_view section, TrainConfig& c) {
    read_object(j, section,
                {{"context_length", set(c.context_length)},
                 {"horizon", set(c.horizon)},
                 {"epochs", set(c.epochs)},
                 {"learning_rate", set(c.learning_rate)},
                 {"batch_size", set(c.batch_size)},
                 {"hidden_size", set(c.hidden_size)},
                 {"num_layers", set(c.num_layers)},
                 {"sigma_floor", set(c.sigma_floor)},
                 {"windows_per_series", set(c.windows_per_series)},
                 {"seed", set(c.seed)}});
}

void read_json(const json& j, std::string_view section, CovariateSpec& s) {
    const std::string lma_section = std::string(section) + ".lma";
    read_object(j, section,
                {{"day_of_week", set(s.day_of_week)},
                 {"lma", [&s, &lma_section](const json& v) {
                      if (v.is_null()) {
                          s.lma.reset();
                          return;
                      }
                      LmaConfig cfg;
                      read_json(v, lma_section, cfg);
                      s.lma = cfg;
                  }}});
}

} // namespace cellcast
