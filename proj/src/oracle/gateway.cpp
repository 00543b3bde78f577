#include "twin/oracle/gateway.hpp"

#include <algorithm>

#include "twin/contracts/standard_contracts.hpp"

namespace twin::oracle {

using consensus::Invocation;

UpkeepSchedule::UpkeepSchedule(TimestampMs interval_ms) : interval_(interval_ms) {
    if (interval_ms < kMinUpkeepInterval) {
        throw std::invalid_argument("upkeep interval below " + std::to_string(kMinUpkeepInterval) + " ms");
    }
}

bool UpkeepSchedule::due(TimestampMs now) const {
    return !last_fire_ || now >= *last_fire_ + interval_;
}

bool UpkeepSchedule::try_fire(TimestampMs now) {
    if (!due(now)) return false;
    if (!anchor_) anchor_ = now;
    last_fire_ = *anchor_ + (now - *anchor_) / interval_ * interval_;
    return true;
}

GatewayConfig GatewayConfig::from_json(const Value& json) {
    GatewayConfig c;
    if (!json.is_object()) return c;
    c.sensor_url = json.value("sensor_url", c.sensor_url);
    c.interval_ms = json.value("interval_ms", c.interval_ms);
    if (json.contains("mode")) {
        const auto mode = json.at("mode").get<std::string>();
        if (mode == "permissioned-direct" || mode == "permissioned") {
            c.mode = GatewayMode::PermissionedDirect;
        } else if (mode == "public-request-fulfill" || mode == "public") {
            c.mode = GatewayMode::PublicRequestFulfill;
        } else {
            throw std::invalid_argument("unknown gateway mode " + mode);
        }
    }
    c.oracle_identity = json.value("oracle_identity", c.oracle_identity);
    c.gateway_identity = json.value("gateway_identity", c.gateway_identity);
    if (json.contains("consumer_funding_link")) {
        const auto& v = json.at("consumer_funding_link");
        c.consumer_funding_link =
            ledger::Amount::from_decimal(v.is_string() ? v.get<std::string>() : v.dump());
    }
    UpkeepSchedule{c.interval_ms};
    return c;
}

Value GatewayConfig::to_json() const {
    return Value{{"consumer_funding_link", consumer_funding_link.to_decimal(6)},
                 {"gateway_identity", gateway_identity},
                 {"interval_ms", interval_ms},
                 {"mode", mode == GatewayMode::PermissionedDirect ? "permissioned-direct" : "public-request-fulfill"},
                 {"oracle_identity", oracle_identity},
                 {"sensor_url", sensor_url}};
}

Value GatewayStats::to_json() const {
    return Value{{"fetch_failures", fetch_failures},
                 {"fulfills", fulfills},
                 {"last_error", last_error},
                 {"submit_failures", submit_failures},
                 {"upkeeps", upkeeps}};
}

OracleGateway::OracleGateway(GatewayConfig config, std::shared_ptr<consensus::LedgerBackend> backend,
                             std::shared_ptr<SensorSource> source)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      source_(std::move(source)),
      schedule_(config_.interval_ms) {}

void OracleGateway::record_failure(std::uint64_t GatewayStats::*counter, const std::string& what) {
    ++(stats_.*counter);
    stats_.last_error = what;
}

std::vector<std::string> OracleGateway::run_upkeep(TimestampMs now) {
    std::lock_guard lock(mutex_);
    if (!schedule_.try_fire(now)) return {};
    ++stats_.upkeeps;
    std::vector<std::string> ids;
    const std::string consumer(contracts::kMultiWordConsumer);

    if (config_.mode == GatewayMode::PermissionedDirect) {
        BuildingData data;
        try {
            data = source_->fetch(now);
        } catch (const FetchError& e) {
            record_failure(&GatewayStats::fetch_failures, e.what());
            return ids;
        }
        try {
            ids.push_back(backend_
                              ->submit({std::string(contracts::kDigitalTwinContract), "SetBuildingData",
                                        Value::array({data.temperature, data.humidity, data.co2_level, data.lux_level}),
                                        config_.gateway_identity})
                              .id);
        } catch (const std::exception& e) {
            record_failure(&GatewayStats::submit_failures, e.what());
        }
        return ids;
    }

    const std::vector<Invocation> calls{
        {consumer, "requestMultipleParameters", Value::array(), config_.gateway_identity},
        {std::string(contracts::kAutomationRegistry), "chargeUpkeep", Value::array({consumer}),
         config_.gateway_identity},
    };
    for (const auto& call : calls) {
        try {
            ids.push_back(backend_->submit(call).id);
        } catch (const std::exception& e) {
            record_failure(&GatewayStats::submit_failures, e.what());
        }
    }
    return ids;
}

std::vector<std::string> OracleGateway::pending_requests() const {
    try {
        auto v = backend_->query(
            {std::string(contracts::kMultiWordConsumer), "getPendingRequests", Value::array(), config_.oracle_identity});
        return v.get<std::vector<std::string>>();
    } catch (const std::exception&) {
        return {};
    }
}

void OracleGateway::prune_in_flight(const std::vector<std::string>& pending) {
    for (auto it = in_flight_.begin(); it != in_flight_.end();) {
        const bool still_pending = std::find(pending.begin(), pending.end(), it->first) != pending.end();
        auto receipt = backend_->receipt(it->second);
        const bool settled_badly =
            receipt && (receipt->status == consensus::TxStatus::Failed ||
                        (receipt->status == consensus::TxStatus::Committed && receipt->code &&
                         *receipt->code != ledger::ValidationCode::Valid));
        if (!still_pending || settled_badly) {
            it = in_flight_.erase(it);
        } else {
            ++it;
        }
    }
}

std::vector<std::string> OracleGateway::fulfill_pending(const std::vector<std::string>& pending, TimestampMs now) {
    std::lock_guard lock(mutex_);
    prune_in_flight(pending);
    std::vector<std::string> ids;
    for (const auto& request : pending) {
        if (in_flight_.contains(request)) continue;
        BuildingData data;
        try {
            data = source_->fetch(now);
        } catch (const FetchError& e) {
            record_failure(&GatewayStats::fetch_failures, e.what());
            continue;
        }
        try {
            auto receipt = backend_->submit({std::string(contracts::kMultiWordConsumer), "fulfillMultipleParameters",
                                             Value::array({request, data.temperature, data.humidity, data.co2_level,
                                                           data.lux_level}),
                                             config_.oracle_identity});
            in_flight_[request] = receipt.id;
            ids.push_back(receipt.id);
            ++stats_.fulfills;
        } catch (const std::exception& e) {
            record_failure(&GatewayStats::submit_failures, e.what());
        }
    }
    return ids;
}

std::vector<std::string> OracleGateway::tick(TimestampMs now) {
    auto ids = run_upkeep(now);
    if (config_.mode == GatewayMode::PublicRequestFulfill) {
        auto more = fulfill_pending(pending_requests(), now);
        ids.insert(ids.end(), more.begin(), more.end());
    }
    return ids;
}

GatewayStats OracleGateway::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

} // namespace twin::oracle
