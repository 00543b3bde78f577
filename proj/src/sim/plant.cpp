#include "twin/sim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace twin::sim {

Value EnvState::to_json() const {
    return Value{{"co_level", co_level}, {"humidity", humidity}, {"lux", lux}, {"sim_time", sim_time},
                 {"temperature", temperature}};
}

EnvState EnvState::from_json(const Value& json) {
    EnvState e;
    e.temperature = json.value("temperature", e.temperature);
    e.humidity = json.value("humidity", e.humidity);
    e.co_level = json.value("co_level", e.co_level);
    e.lux = json.value("lux", e.lux);
    e.sim_time = json.value("sim_time", e.sim_time);
    return e;
}

Value DeviceState::to_json() const {
    return Value{{"bulb_brightness", bulb_brightness},
                 {"fan_level", fan_level},
                 {"heater_on", heater_on},
                 {"humidifier_on", humidifier_on},
                 {"purifier_level", purifier_level}};
}

const char* to_string(Device d) noexcept {
    switch (d) {
        case Device::Fan: return "fan";
        case Device::Heater: return "heater";
        case Device::Bulb: return "bulb";
        case Device::Purifier: return "purifier";
        case Device::Humidifier: return "humidifier";
    }
    return "unknown";
}

const char* to_string(Action a) noexcept {
    switch (a) {
        case Action::SetLevel: return "set-level";
        case Action::On: return "on";
        case Action::Off: return "off";
    }
    return "unknown";
}

Value DeviceCommand::to_json() const {
    Value out{{"action", to_string(action)}, {"device", to_string(device)}};
    if (level) out["level"] = *level;
    return out;
}

DeviceCommand DeviceCommand::from_json(const Value& json) {
    if (!json.is_object() || !json.contains("device") || !json.contains("action")) {
        throw SimError(SimError::Kind::MalformedCommand, "command needs device and action");
    }
    DeviceCommand cmd;
    const auto device = json.at("device").get<std::string>();
    const auto action = json.at("action").get<std::string>();
    bool found = false;
    for (auto d : {Device::Fan, Device::Heater, Device::Bulb, Device::Purifier, Device::Humidifier}) {
        if (device == to_string(d)) {
            cmd.device = d;
            found = true;
        }
    }
    if (!found) throw SimError(SimError::Kind::MalformedCommand, "unknown device " + device);
    if (action == "set-level") {
        cmd.action = Action::SetLevel;
    } else if (action == "on") {
        cmd.action = Action::On;
    } else if (action == "off") {
        cmd.action = Action::Off;
    } else {
        throw SimError(SimError::Kind::MalformedCommand, "unknown action " + action);
    }
    if (json.contains("level")) cmd.level = json.at("level").get<int>();
    return cmd;
}

double daylight(double sim_time, const PlantParams& p) {
    return p.daylight_peak * std::max(0.0, std::sin(2.0 * std::numbers::pi * sim_time / p.day_length));
}

EnvState step(const EnvState& env, const DeviceState& dev, double dt, const PlantParams& p) {
    if (!(dt > 0.0)) throw SimError(SimError::Kind::NonPositiveDt, "dt must be positive");
    EnvState next = env;
    next.temperature += (p.alpha * (p.t_ambient - env.temperature) + p.beta * (dev.heater_on ? 1.0 : 0.0) -
                         p.gamma * dev.fan_level) *
                        dt;
    next.humidity += (p.alpha_h * (p.h_ambient - env.humidity) + p.beta_h * (dev.humidifier_on ? 1.0 : 0.0)) * dt;
    next.humidity = std::clamp(next.humidity, 0.0, 100.0);
    next.co_level += (p.sigma_src - p.rho * dev.purifier_level * env.co_level / p.co_ref) * dt;
    next.co_level = std::max(0.0, next.co_level);
    next.sim_time = env.sim_time + dt;
    next.lux = daylight(next.sim_time, p) + p.kappa * dev.bulb_brightness;
    return next;
}

namespace {

int max_level(Device d) {
    switch (d) {
        case Device::Fan:
        case Device::Purifier: return 3;
        case Device::Bulb: return 100;
        default: return 1;
    }
}

bool is_switch(Device d) {
    return d == Device::Heater || d == Device::Humidifier;
}

} // namespace

DeviceState apply_command(const DeviceState& dev, const DeviceCommand& cmd) {
    int level = 0;
    if (cmd.action == Action::SetLevel) {
        if (!cmd.level) throw SimError(SimError::Kind::MalformedCommand, "set-level needs a level");
        if (is_switch(cmd.device)) {
            throw SimError(SimError::Kind::MalformedCommand, std::string(to_string(cmd.device)) + " is on/off only");
        }
        level = *cmd.level;
        if (level < 0 || level > max_level(cmd.device)) {
            throw SimError(SimError::Kind::RangeViolation, std::string(to_string(cmd.device)) + " level " +
                                                               std::to_string(level) + " out of range");
        }
    } else {
        if (cmd.level) throw SimError(SimError::Kind::MalformedCommand, "on/off takes no level");
        level = cmd.action == Action::On ? max_level(cmd.device) : 0;
    }
    DeviceState out = dev;
    switch (cmd.device) {
        case Device::Fan: out.fan_level = level; break;
        case Device::Heater: out.heater_on = level > 0; break;
        case Device::Bulb: out.bulb_brightness = level; break;
        case Device::Purifier: out.purifier_level = level; break;
        case Device::Humidifier: out.humidifier_on = level > 0; break;
    }
    return out;
}

Value SensorReading::to_json() const {
    return Value{{"CO2", co2_level},
                 {"CO2Level", co2_level},
                 {"Humidity", humidity},
                 {"LuxLevel", lux_level},
                 {"Temperature", temperature}};
}

SensorReading read_sensors(const EnvState& env, double noise_amplitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-noise_amplitude, noise_amplitude);
    auto jitter = [&](double v) { return noise_amplitude > 0.0 ? v + noise(rng) : v; };
    SensorReading r;
    r.temperature = std::round(jitter(env.temperature) * 10.0) / 10.0;
    r.humidity = std::clamp(std::round(jitter(env.humidity) * 10.0) / 10.0, 0.0, 100.0);
    r.co2_level = std::max(0.0, std::round(jitter(env.co_level)));
    r.lux_level = std::max(0.0, std::round(jitter(env.lux)));
    r.fetched_at = static_cast<TimestampMs>(std::llround(env.sim_time * 1000.0));
    return r;
}

} // namespace twin::sim
