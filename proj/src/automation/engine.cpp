#include "twin/automation/engine.hpp"

#include <cmath>

#include "twin/contracts/standard_contracts.hpp"

namespace twin::automation {

using sim::Device;
using sim::DeviceCommand;

Value Rationale::to_json() const {
    return Value{{"reading", reading}, {"rule", rule}, {"threshold", threshold}};
}

Value ControlDecision::to_json() const {
    Value cmds = Value::array();
    for (const auto& c : commands) cmds.push_back(c.to_json());
    Value why = Value::array();
    for (const auto& r : rationale) why.push_back(r.to_json());
    return Value{{"commands", std::move(cmds)}, {"rationale", std::move(why)}, {"tick", tick}};
}

std::int64_t deadband(std::int64_t min, std::int64_t max, double fraction) {
    if (max <= min) return 0;
    return std::llround(fraction * static_cast<double>(max - min));
}

namespace {

class Builder {
public:
    explicit Builder(const sim::DeviceState& dev) : dev_(dev) {}

    void issue(const DeviceCommand& cmd, std::string rule, std::int64_t reading, std::int64_t threshold) {
        if (sim::apply_command(dev_, cmd) == dev_) return;
        out.commands.push_back(cmd);
        out.rationale.push_back({std::move(rule), reading, threshold});
    }

    ControlDecision out;

private:
    const sim::DeviceState& dev_;
};

} // namespace

ControlDecision decide(const BuildingData& data, const ThresholdConfig& cfg, const sim::DeviceState& dev,
                       double deadband_fraction) {
    if (!(deadband_fraction >= 0.0 && deadband_fraction < 0.5)) {
        throw std::invalid_argument("deadband fraction must be in [0, 0.5)");
    }
    Builder b(dev);

    const auto t = data.temperature;
    const auto t_band = deadband(cfg.min_temperature, cfg.max_temperature, deadband_fraction);
    if (t > cfg.max_temperature) {
        b.issue(DeviceCommand::set_level(Device::Fan, 3), "temperature-above-max", t, cfg.max_temperature);
        b.issue(DeviceCommand::off(Device::Heater), "temperature-above-max", t, cfg.max_temperature);
    } else if (t < cfg.min_temperature) {
        b.issue(DeviceCommand::on(Device::Heater), "temperature-below-min", t, cfg.min_temperature);
        b.issue(DeviceCommand::set_level(Device::Fan, 0), "temperature-below-min", t, cfg.min_temperature);
    } else {
        if (t <= cfg.max_temperature - t_band) {
            b.issue(DeviceCommand::set_level(Device::Fan, 0), "temperature-within-band", t,
                    cfg.max_temperature - t_band);
        }
        if (t >= cfg.min_temperature + t_band) {
            b.issue(DeviceCommand::off(Device::Heater), "temperature-within-band", t, cfg.min_temperature + t_band);
        }
    }

    if (data.lux_level < cfg.min_lux_level) {
        b.issue(DeviceCommand::set_level(Device::Bulb, 100), "lux-below-min", data.lux_level, cfg.min_lux_level);
    } else if (data.lux_level > cfg.max_lux_level) {
        b.issue(DeviceCommand::set_level(Device::Bulb, 0), "lux-above-max", data.lux_level, cfg.max_lux_level);
    }

    const auto c_band = deadband(cfg.min_co2_level, cfg.max_co2_level, deadband_fraction);
    if (data.co2_level > cfg.max_co2_level) {
        b.issue(DeviceCommand::set_level(Device::Purifier, 3), "co2-above-max", data.co2_level, cfg.max_co2_level);
    } else if (data.co2_level < cfg.max_co2_level - c_band) {
        b.issue(DeviceCommand::set_level(Device::Purifier, 0), "co2-below-band", data.co2_level,
                cfg.max_co2_level - c_band);
    }

    const auto h_band = deadband(cfg.min_humidity, cfg.max_humidity, deadband_fraction);
    if (data.humidity < cfg.min_humidity) {
        b.issue(DeviceCommand::on(Device::Humidifier), "humidity-below-min", data.humidity, cfg.min_humidity);
    } else if (data.humidity > cfg.min_humidity + h_band) {
        b.issue(DeviceCommand::off(Device::Humidifier), "humidity-above-band", data.humidity,
                cfg.min_humidity + h_band);
    }
    return std::move(b.out);
}

Observation BackendTwinReader::read() {
    using consensus::BackendError;
    const auto snapshot = backend_->state();
    const bool is_public = backend_->kind() == consensus::BackendKind::Public;
    const contracts::ExecEnv env{backend_->clock()->now_ms(), snapshot.height() + 1, is_public};
    auto call = [&](std::string_view contract, std::string method) {
        return contracts::execute(backend_->registry(), snapshot,
                                  {std::string(contract), std::move(method), Value::array(), "controller"}, env)
            .result;
    };
    try {
        Observation obs;
        obs.height = snapshot.height();
        obs.data = contracts::BuildingData::from_json(
            is_public ? call(contracts::kMultiWordConsumer, "getBuildingData")
                      : call(contracts::kDigitalTwinContract, "GetBuildingData"));
        for (auto t : contracts::kAllThresholds) {
            obs.thresholds.set(t, call(contracts::kBuildingAutomationConfig, "get" + contracts::capitalized_name(t))
                                      .get<std::int64_t>());
        }
        return obs;
    } catch (const contracts::ContractError& e) {
        throw BackendError(BackendError::Kind::BackendUnavailable, e.what());
    }
}

AuditLog::AuditLog(std::optional<std::filesystem::path> path, std::size_t keep) : path_(std::move(path)), keep_(keep) {
    if (path_) {
        if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
        out_.open(*path_, std::ios::app);
        if (!out_) throw std::runtime_error("cannot open audit log " + path_->string());
    }
}

void AuditLog::append(const Value& entry) {
    std::lock_guard lock(mutex_);
    if (out_.is_open()) {
        out_ << entry.dump() << '\n';
        out_.flush();
    }
    recent_.push_back(entry);
    if (recent_.size() > keep_) recent_.erase(recent_.begin());
    ++total_;
}

std::vector<Value> AuditLog::tail(std::size_t n) const {
    std::lock_guard lock(mutex_);
    const std::size_t from = recent_.size() > n ? recent_.size() - n : 0;
    return {recent_.begin() + static_cast<std::ptrdiff_t>(from), recent_.end()};
}

std::size_t AuditLog::size() const {
    std::lock_guard lock(mutex_);
    return total_;
}

ControllerConfig ControllerConfig::from_json(const Value& json) {
    ControllerConfig c;
    if (!json.is_object()) return c;
    c.tick_ms = json.value("tick_ms", c.tick_ms);
    c.deadband_fraction = json.value("deadband_fraction", c.deadband_fraction);
    if (c.tick_ms <= 0) throw std::invalid_argument("tick_ms must be positive");
    if (!(c.deadband_fraction >= 0.0 && c.deadband_fraction < 0.5)) {
        throw std::invalid_argument("deadband_fraction must be in [0, 0.5)");
    }
    return c;
}

Value ControllerConfig::to_json() const {
    return Value{{"deadband_fraction", deadband_fraction}, {"tick_ms", tick_ms}};
}

Controller::Controller(ControllerConfig config, std::shared_ptr<TwinReader> reader,
                       std::shared_ptr<sim::DeviceActuator> actuator, std::shared_ptr<AuditLog> audit)
    : config_(config), reader_(std::move(reader)), actuator_(std::move(actuator)), audit_(std::move(audit)) {}

std::optional<ControlDecision> Controller::control_tick(TimestampMs now) {
    std::vector<DecisionListener> listeners;
    Value entry;
    std::optional<ControlDecision> result;
    {
        std::lock_guard lock(mutex_);
        last_tick_ = now;
        const std::int64_t tick = ++tick_;
        try {
            auto obs = reader_->read();
            auto decision = decide(obs.data, obs.thresholds, actuator_->devices(), config_.deadband_fraction);
            decision.tick = tick;
            for (const auto& cmd : decision.commands) actuator_->apply(cmd);
            entry = decision.to_json();
            entry["at"] = now;
            entry["height"] = obs.height;
            entry["readings"] = obs.data.to_json();
            entry["devices"] = actuator_->devices().to_json();
            last_observation_ = obs;
            result = std::move(decision);
        } catch (const consensus::BackendError& e) {
            entry = Value{{"at", now}, {"reason", e.what()}, {"skipped", true}, {"tick", tick}};
        }
        listeners = listeners_;
    }
    if (audit_) audit_->append(entry);
    for (const auto& l : listeners) l(entry);
    return result;
}

std::optional<ControlDecision> Controller::maybe_tick(TimestampMs now) {
    {
        std::lock_guard lock(mutex_);
        if (last_tick_ && now < *last_tick_ + config_.tick_ms) return std::nullopt;
    }
    return control_tick(now);
}

void Controller::on_decision(DecisionListener listener) {
    std::lock_guard lock(mutex_);
    listeners_.push_back(std::move(listener));
}

std::int64_t Controller::ticks() const {
    std::lock_guard lock(mutex_);
    return tick_;
}

std::optional<Observation> Controller::last_observation() const {
    std::lock_guard lock(mutex_);
    return last_observation_;
}

} // namespace twin::automation
