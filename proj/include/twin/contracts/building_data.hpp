#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "twin/ledger/types.hpp"

namespace twin::contracts {

/// Environmental readings in centi-units (x100): centi-degC, centi-%RH,
/// centi-ppm, centi-lux. Only temperature may be negative.
struct BuildingData {
    std::int64_t temperature = 0;
    std::int64_t humidity = 0;
    std::int64_t co2_level = 0;
    std::int64_t lux_level = 0;
    TimestampMs as_of = 0;

    Value to_json() const;
    static BuildingData from_json(const Value& json);

    bool operator==(const BuildingData&) const = default;
};

/// Defaults written by InitLedger: 22 degC, 50 %RH, 400 ppm, 300 lux.
inline constexpr BuildingData kDefaultBuildingData{2200, 5000, 40000, 30000, 0};

enum class Threshold {
    MinTemperature,
    MaxTemperature,
    MinCO2Level,
    MaxCO2Level,
    MinLuxLevel,
    MaxLuxLevel,
    MinHumidity,
    MaxHumidity,
};

inline constexpr std::array<Threshold, 8> kAllThresholds{
    Threshold::MinTemperature, Threshold::MaxTemperature, Threshold::MinCO2Level, Threshold::MaxCO2Level,
    Threshold::MinLuxLevel,    Threshold::MaxLuxLevel,    Threshold::MinHumidity, Threshold::MaxHumidity,
};

/// Field name as declared in the config contract, e.g. "maxTemperature".
std::string_view field_name(Threshold t) noexcept;
/// Capitalized form used in method and event names, e.g. "MaxTemperature".
std::string capitalized_name(Threshold t);
std::optional<Threshold> parse_threshold(std::string_view field);
bool is_signed(Threshold t) noexcept;

struct ThresholdConfig {
    std::int64_t min_temperature = 0;
    std::int64_t max_temperature = 0;
    std::int64_t min_co2_level = 0;
    std::int64_t max_co2_level = 0;
    std::int64_t min_lux_level = 0;
    std::int64_t max_lux_level = 0;
    std::int64_t min_humidity = 0;
    std::int64_t max_humidity = 0;
    std::string owner;

    std::int64_t get(Threshold t) const noexcept;
    void set(Threshold t, std::int64_t v) noexcept;

    Value to_json() const;
    bool operator==(const ThresholdConfig&) const = default;
};

} // namespace twin::contracts
