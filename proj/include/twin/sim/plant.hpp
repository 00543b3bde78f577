#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "twin/ledger/types.hpp"

namespace twin::sim {

class SimError : public std::runtime_error {
public:
    enum class Kind { NonPositiveDt, RangeViolation, MalformedCommand };

    SimError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

struct EnvState {
    double temperature = 24.0;  // deg C
    double humidity = 50.0;     // %RH
    double co_level = 400.0;    // ppm
    double lux = 0.0;
    double sim_time = 0.0;      // s

    Value to_json() const;
    static EnvState from_json(const Value& json);
    bool operator==(const EnvState&) const = default;
};

struct DeviceState {
    int fan_level = 0;          // 0..3
    bool heater_on = false;
    int bulb_brightness = 0;    // 0..100
    int purifier_level = 0;     // 0..3
    bool humidifier_on = false;

    Value to_json() const;
    bool operator==(const DeviceState&) const = default;
};

enum class Device { Fan, Heater, Bulb, Purifier, Humidifier };
enum class Action { SetLevel, On, Off };

const char* to_string(Device d) noexcept;
const char* to_string(Action a) noexcept;

struct DeviceCommand {
    Device device = Device::Fan;
    Action action = Action::Off;
    std::optional<int> level;

    static DeviceCommand set_level(Device d, int level) { return {d, Action::SetLevel, level}; }
    static DeviceCommand on(Device d) { return {d, Action::On, std::nullopt}; }
    static DeviceCommand off(Device d) { return {d, Action::Off, std::nullopt}; }

    Value to_json() const;
    static DeviceCommand from_json(const Value& json);
    bool operator==(const DeviceCommand&) const = default;
};

/// First-order room model coefficients.
struct PlantParams {
    double alpha = 0.002;       // 1/s, thermal coupling to ambient
    double beta = 0.01;         // deg C/s, heater
    double gamma = 0.004;       // deg C/s per fan level
    double alpha_h = 0.002;     // 1/s
    double beta_h = 0.05;       // %/s, humidifier
    double sigma_src = 0.05;    // ppm/s
    double rho = 0.02;          // 1/s
    double co_ref = 400.0;      // ppm
    double kappa = 3.0;         // lux per brightness point
    double daylight_peak = 500.0;
    double day_length = 86400.0;
    double t_ambient = 24.0;
    double h_ambient = 50.0;
};

double daylight(double sim_time, const PlantParams& params);

/// One explicit-Euler step of `dt` seconds. Throws SimError(NonPositiveDt).
EnvState step(const EnvState& env, const DeviceState& dev, double dt, const PlantParams& params = {});

/// Throws SimError(RangeViolation) for an out-of-range level and
/// SimError(MalformedCommand) when level presence does not match the action.
DeviceState apply_command(const DeviceState& dev, const DeviceCommand& cmd);

/// Sensor values as served by the building endpoint.
struct SensorReading {
    double temperature = 0.0;
    double humidity = 0.0;
    double co2_level = 0.0;
    double lux_level = 0.0;
    TimestampMs fetched_at = 0;

    /// {"Temperature", "Humidity", "CO2Level", "CO2", "LuxLevel"}
    Value to_json() const;
    bool operator==(const SensorReading&) const = default;
};

/// Adds seeded uniform noise in [-noise, +noise] per channel, then quantizes
/// temperature and humidity to 0.1 and CO2 and lux to integers.
SensorReading read_sensors(const EnvState& env, double noise_amplitude, std::uint64_t seed);

} // namespace twin::sim
