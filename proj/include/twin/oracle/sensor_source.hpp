#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "twin/contracts/building_data.hpp"
#include "twin/sim/simulator.hpp"

namespace twin::oracle {

using contracts::BuildingData;

class FetchError : public std::runtime_error {
public:
    enum class Kind { Unreachable, MalformedBody };

    FetchError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// round-half-up(x * 100) computed on the shortest decimal form of `x`, so
/// 1.005 scales to 101 even though its binary value is slightly below.
std::int64_t scale_centi(double x);

/// Parses the flat sensor JSON. "CO2Level" wins over the alias "CO2".
/// Throws FetchError(MalformedBody).
BuildingData parse_sensor_body(std::string_view body, TimestampMs fetched_at);

class SensorSource {
public:
    virtual ~SensorSource() = default;
    /// Throws FetchError.
    virtual BuildingData fetch(TimestampMs now) = 0;
};

class HttpSensorSource final : public SensorSource {
public:
    /// `url` like "http://127.0.0.1:8081/".
    explicit HttpSensorSource(std::string url, int timeout_ms = 2000);
    BuildingData fetch(TimestampMs now) override;

private:
    std::string origin_;
    std::string path_;
    int timeout_ms_;
};

/// Reads the simulator directly through the same body encoding as the endpoint.
class SimulatorSensorSource final : public SensorSource {
public:
    explicit SimulatorSensorSource(std::shared_ptr<const sim::BuildingSimulator> sim) : sim_(std::move(sim)) {}
    BuildingData fetch(TimestampMs now) override;

private:
    std::shared_ptr<const sim::BuildingSimulator> sim_;
};

/// Body produced by a callback; the callback may throw FetchError.
class FunctionSensorSource final : public SensorSource {
public:
    explicit FunctionSensorSource(std::function<std::string()> body) : body_(std::move(body)) {}
    BuildingData fetch(TimestampMs now) override { return parse_sensor_body(body_(), now); }

private:
    std::function<std::string()> body_;
};

} // namespace twin::oracle
