#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "twin/consensus/backend.hpp"
#include "twin/contracts/building_data.hpp"
#include "twin/sim/simulator.hpp"

namespace twin::automation {

using contracts::BuildingData;
using contracts::ThresholdConfig;

struct Rationale {
    std::string rule;
    std::int64_t reading = 0;
    std::int64_t threshold = 0;

    Value to_json() const;
    bool operator==(const Rationale&) const = default;
};

/// commands[i] is justified by rationale[i].
struct ControlDecision {
    std::vector<sim::DeviceCommand> commands;
    std::vector<Rationale> rationale;
    std::int64_t tick = 0;

    Value to_json() const;
    bool operator==(const ControlDecision&) const = default;
};

inline constexpr double kDefaultDeadband = 0.05;

/// fraction x (max - min) rounded to the nearest centi-unit, or 0 when max <= min.
std::int64_t deadband(std::int64_t min, std::int64_t max, double fraction);

/// Pure rule evaluation over scaled integers. Throws std::invalid_argument
/// unless 0 <= deadband_fraction < 0.5.
ControlDecision decide(const BuildingData& data, const ThresholdConfig& cfg, const sim::DeviceState& dev,
                       double deadband_fraction = kDefaultDeadband);

/// Committed readings and thresholds observed at one block height.
struct Observation {
    BuildingData data;
    ThresholdConfig thresholds;
    std::int64_t height = -1;
};

class TwinReader {
public:
    virtual ~TwinReader() = default;
    /// Throws consensus::BackendError(BackendUnavailable) when nothing can be read.
    virtual Observation read() = 0;
};

/// Reads one committed snapshot of a backend: the 8 threshold getters plus
/// GetBuildingData (permissioned) or MultiWordConsumer.getBuildingData (public).
class BackendTwinReader final : public TwinReader {
public:
    explicit BackendTwinReader(std::shared_ptr<const consensus::LedgerBackend> backend) : backend_(std::move(backend)) {}
    Observation read() override;

private:
    std::shared_ptr<const consensus::LedgerBackend> backend_;
};

/// Append-only JSON-lines log. The in-memory tail keeps the last `keep` lines.
class AuditLog {
public:
    explicit AuditLog(std::optional<std::filesystem::path> path = std::nullopt, std::size_t keep = 1000);

    void append(const Value& entry);
    std::vector<Value> tail(std::size_t n) const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::optional<std::filesystem::path> path_;
    std::ofstream out_;
    std::size_t keep_;
    std::vector<Value> recent_;
    std::size_t total_ = 0;
};

struct ControllerConfig {
    TimestampMs tick_ms = 5000;
    double deadband_fraction = kDefaultDeadband;

    static ControllerConfig from_json(const Value& json);
    Value to_json() const;
};

class Controller {
public:
    using DecisionListener = std::function<void(const Value& audit_entry)>;

    Controller(ControllerConfig config, std::shared_ptr<TwinReader> reader, std::shared_ptr<sim::DeviceActuator> actuator,
               std::shared_ptr<AuditLog> audit);

    /// Reads, decides, actuates and logs. Returns nothing when the read failed;
    /// the skip is logged.
    std::optional<ControlDecision> control_tick(TimestampMs now);
    /// control_tick when `tick_ms` has passed since the last tick.
    std::optional<ControlDecision> maybe_tick(TimestampMs now);

    void on_decision(DecisionListener listener);
    const ControllerConfig& config() const noexcept { return config_; }
    std::int64_t ticks() const;
    std::optional<Observation> last_observation() const;

private:
    ControllerConfig config_;
    std::shared_ptr<TwinReader> reader_;
    std::shared_ptr<sim::DeviceActuator> actuator_;
    std::shared_ptr<AuditLog> audit_;
    mutable std::mutex mutex_;
    std::int64_t tick_ = 0;
    std::optional<TimestampMs> last_tick_;
    std::optional<Observation> last_observation_;
    std::vector<DecisionListener> listeners_;
};

} // namespace twin::automation
