#include "twin/contracts/building_data.hpp"

#include "twin/contracts/runtime.hpp"

namespace twin::contracts {

Value BuildingData::to_json() const {
    return Value{{"CO2Level", co2_level}, {"as_of", as_of}, {"humidity", humidity},
                 {"luxLevel", lux_level}, {"temperature", temperature}};
}

BuildingData BuildingData::from_json(const Value& json) {
    auto num = [&](const char* key) -> std::int64_t {
        if (!json.contains(key) || !json.at(key).is_number_integer()) {
            throw ContractError(ContractError::Kind::BadArgument, std::string("building data lacks integer ") + key);
        }
        return json.at(key).get<std::int64_t>();
    };
    BuildingData d;
    d.temperature = num("temperature");
    d.humidity = num("humidity");
    d.co2_level = num("CO2Level");
    d.lux_level = num("luxLevel");
    d.as_of = json.contains("as_of") ? num("as_of") : 0;
    return d;
}

std::string_view field_name(Threshold t) noexcept {
    switch (t) {
        case Threshold::MinTemperature: return "minTemperature";
        case Threshold::MaxTemperature: return "maxTemperature";
        case Threshold::MinCO2Level: return "minCO2Level";
        case Threshold::MaxCO2Level: return "maxCO2Level";
        case Threshold::MinLuxLevel: return "minLuxLevel";
        case Threshold::MaxLuxLevel: return "maxLuxLevel";
        case Threshold::MinHumidity: return "minHumidity";
        case Threshold::MaxHumidity: return "maxHumidity";
    }
    return "";
}

std::string capitalized_name(Threshold t) {
    std::string s(field_name(t));
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::optional<Threshold> parse_threshold(std::string_view field) {
    for (auto t : kAllThresholds) {
        if (field_name(t) == field) return t;
    }
    return std::nullopt;
}

bool is_signed(Threshold t) noexcept {
    return t == Threshold::MinTemperature || t == Threshold::MaxTemperature;
}

std::int64_t ThresholdConfig::get(Threshold t) const noexcept {
    switch (t) {
        case Threshold::MinTemperature: return min_temperature;
        case Threshold::MaxTemperature: return max_temperature;
        case Threshold::MinCO2Level: return min_co2_level;
        case Threshold::MaxCO2Level: return max_co2_level;
        case Threshold::MinLuxLevel: return min_lux_level;
        case Threshold::MaxLuxLevel: return max_lux_level;
        case Threshold::MinHumidity: return min_humidity;
        case Threshold::MaxHumidity: return max_humidity;
    }
    return 0;
}

void ThresholdConfig::set(Threshold t, std::int64_t v) noexcept {
    switch (t) {
        case Threshold::MinTemperature: min_temperature = v; break;
        case Threshold::MaxTemperature: max_temperature = v; break;
        case Threshold::MinCO2Level: min_co2_level = v; break;
        case Threshold::MaxCO2Level: max_co2_level = v; break;
        case Threshold::MinLuxLevel: min_lux_level = v; break;
        case Threshold::MaxLuxLevel: max_lux_level = v; break;
        case Threshold::MinHumidity: min_humidity = v; break;
        case Threshold::MaxHumidity: max_humidity = v; break;
    }
}

Value ThresholdConfig::to_json() const {
    Value out = Value::object();
    for (auto t : kAllThresholds) out[std::string(field_name(t))] = get(t);
    out["owner"] = owner;
    return out;
}

} // namespace twin::contracts
