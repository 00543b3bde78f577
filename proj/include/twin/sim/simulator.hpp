#pragma once

#include <memory>
#include <mutex>
#include <thread>

#include "twin/sim/plant.hpp"

namespace twin::sim {

/// Command sink for the automation engine.
class DeviceActuator {
public:
    virtual ~DeviceActuator() = default;
    virtual DeviceState devices() const = 0;
    virtual void apply(const DeviceCommand& cmd) = 0;
};

struct SimConfig {
    TimestampMs dt_ms = 1000;
    double noise_amplitude = 0.0;
    std::uint64_t seed = 0;
    double realtime_factor = 1.0;
    PlantParams params;
    EnvState initial;
    DeviceState initial_devices;

    /// Keys: dt_ms, t_ambient, h_ambient, noise_amplitude, seed,
    /// realtime_factor, initial (an EnvState object).
    static SimConfig from_json(const Value& json);
    Value to_json() const;
};

/// Thread-safe plant. Time advances in whole `dt_ms` ticks.
class BuildingSimulator final : public DeviceActuator {
public:
    explicit BuildingSimulator(SimConfig config = {});

    /// Steps until `elapsed_ms` of simulated time have passed since start.
    void advance_to(TimestampMs elapsed_ms);
    void step_once();

    EnvState env() const;
    DeviceState devices() const override;
    void apply(const DeviceCommand& cmd) override;
    std::uint64_t ticks() const;

    /// Reading for the current tick; repeated calls within a tick agree.
    SensorReading sample() const;

    const SimConfig& config() const noexcept { return config_; }

private:
    void step_locked();

    SimConfig config_;
    mutable std::mutex mutex_;
    EnvState env_;
    DeviceState devices_;
    std::uint64_t ticks_ = 0;
};

/// Seed for tick `tick` of a run seeded with `seed`.
std::uint64_t tick_seed(std::uint64_t seed, std::uint64_t tick);

} // namespace twin::sim
