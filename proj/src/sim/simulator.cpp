#include "twin/sim/simulator.hpp"

namespace twin::sim {

SimConfig SimConfig::from_json(const Value& json) {
    SimConfig c;
    if (!json.is_object()) return c;
    c.dt_ms = json.value("dt_ms", c.dt_ms);
    c.params.t_ambient = json.value("t_ambient", c.params.t_ambient);
    c.params.h_ambient = json.value("h_ambient", c.params.h_ambient);
    c.noise_amplitude = json.value("noise_amplitude", c.noise_amplitude);
    c.seed = json.value("seed", c.seed);
    c.realtime_factor = json.value("realtime_factor", c.realtime_factor);
    if (json.contains("initial")) c.initial = EnvState::from_json(json.at("initial"));
    if (c.dt_ms <= 0) throw SimError(SimError::Kind::NonPositiveDt, "dt_ms must be positive");
    if (c.noise_amplitude < 0) throw std::invalid_argument("noise_amplitude must be non-negative");
    if (c.realtime_factor <= 0) throw std::invalid_argument("realtime_factor must be positive");
    return c;
}

Value SimConfig::to_json() const {
    return Value{{"dt_ms", dt_ms},
                 {"h_ambient", params.h_ambient},
                 {"initial", initial.to_json()},
                 {"noise_amplitude", noise_amplitude},
                 {"realtime_factor", realtime_factor},
                 {"seed", seed},
                 {"t_ambient", params.t_ambient}};
}

std::uint64_t tick_seed(std::uint64_t seed, std::uint64_t tick) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tick + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

BuildingSimulator::BuildingSimulator(SimConfig config)
    : config_(std::move(config)), env_(config_.initial), devices_(config_.initial_devices) {
    env_.lux = daylight(env_.sim_time, config_.params) + config_.params.kappa * devices_.bulb_brightness;
}

void BuildingSimulator::advance_to(TimestampMs elapsed_ms) {
    std::lock_guard lock(mutex_);
    while (static_cast<TimestampMs>(ticks_ + 1) * config_.dt_ms <= elapsed_ms) step_locked();
}

void BuildingSimulator::step_once() {
    std::lock_guard lock(mutex_);
    step_locked();
}

void BuildingSimulator::step_locked() {
    env_ = step(env_, devices_, static_cast<double>(config_.dt_ms) / 1000.0, config_.params);
    ++ticks_;
}

EnvState BuildingSimulator::env() const {
    std::lock_guard lock(mutex_);
    return env_;
}

DeviceState BuildingSimulator::devices() const {
    std::lock_guard lock(mutex_);
    return devices_;
}

void BuildingSimulator::apply(const DeviceCommand& cmd) {
    std::lock_guard lock(mutex_);
    devices_ = apply_command(devices_, cmd);
}

std::uint64_t BuildingSimulator::ticks() const {
    std::lock_guard lock(mutex_);
    return ticks_;
}

SensorReading BuildingSimulator::sample() const {
    std::lock_guard lock(mutex_);
    return read_sensors(env_, config_.noise_amplitude, tick_seed(config_.seed, ticks_));
}

} // namespace twin::sim
