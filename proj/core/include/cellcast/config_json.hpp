#pragma once

#include "cellcast/error.hpp"
#include "cellcast/lma.hpp"
#include "cellcast/model.hpp"
#include "cellcast/synthgen.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <type_traits>

namespace cellcast {

// JSON mapping of the module configs. Readers are strict: an unknown key or
// a value of the wrong type raises ValidationError naming `section.key`.
// Keys absent from the object keep their current value.

nlohmann::json to_json(const SynthConfig& cfg);
nlohmann::json to_json(const LmaConfig& cfg);
nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const CovariateSpec& spec);

void read_json(const nlohmann::json& j, std::string_view section, SynthConfig& cfg);
void read_json(const nlohmann::json& j, std::string_view section, LmaConfig& cfg);
void read_json(const nlohmann::json& j, std::string_view section, TrainConfig& cfg);
void read_json(const nlohmann::json& j, std::string_view section, CovariateSpec& spec);

/// Assigns one JSON value to a config field; throws ValidationError on a
/// type mismatch.
using Setter = std::function<void(const nlohmann::json&)>;

/// Dispatches every key of object `j` to its setter.
void read_object(const nlohmann::json& j, std::string_view section, const std::map<std::string, Setter>& setters);

template <class T>
Setter set(T& field) {
    return [&field](const nlohmann::json& v) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ValidationError("expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ValidationError("expected an integer");
            if (!v.is_number_unsigned() && v.template get<long long>() < 0) {
                throw ValidationError("expected a non-negative integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ValidationError("expected a number");
        } else {
            if (!v.is_string()) throw ValidationError("expected a string");
        }
        field = v.template get<T>();
    };
}

} // namespace cellcast
