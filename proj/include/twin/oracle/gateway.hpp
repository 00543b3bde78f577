#pragma once

#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "twin/consensus/backend.hpp"
#include "twin/ledger/amount.hpp"
#include "twin/oracle/sensor_source.hpp"

namespace twin::oracle {

inline constexpr TimestampMs kDefaultUpkeepInterval = 60'000;
inline constexpr TimestampMs kMinUpkeepInterval = 5'000;

/// Fires at most once per interval on a grid anchored at the first fire.
/// A late tick fires once and realigns to the grid; missed slots are dropped.
class UpkeepSchedule {
public:
    explicit UpkeepSchedule(TimestampMs interval_ms = kDefaultUpkeepInterval);

    bool due(TimestampMs now) const;
    /// Returns true and records the fire when due.
    bool try_fire(TimestampMs now);

    TimestampMs interval() const noexcept { return interval_; }
    std::optional<TimestampMs> last_fire() const noexcept { return last_fire_; }

private:
    TimestampMs interval_;
    std::optional<TimestampMs> anchor_;
    std::optional<TimestampMs> last_fire_;
};

enum class GatewayMode { PermissionedDirect, PublicRequestFulfill };

struct GatewayConfig {
    std::string sensor_url = "http://127.0.0.1:8081/";
    TimestampMs interval_ms = kDefaultUpkeepInterval;
    GatewayMode mode = GatewayMode::PermissionedDirect;
    std::string oracle_identity = "oracle";
    /// Identity that submits upkeeps and SetBuildingData.
    std::string gateway_identity = "gateway";
    ledger::Amount consumer_funding_link = ledger::Amount::from_decimal("1");

    static GatewayConfig from_json(const Value& json);
    Value to_json() const;
};

struct GatewayStats {
    std::uint64_t upkeeps = 0;
    std::uint64_t fulfills = 0;
    std::uint64_t fetch_failures = 0;
    std::uint64_t submit_failures = 0;
    std::string last_error;

    Value to_json() const;
};

/// Moves sensor readings onto the ledger on a fixed schedule.
class OracleGateway {
public:
    OracleGateway(GatewayConfig config, std::shared_ptr<consensus::LedgerBackend> backend,
                  std::shared_ptr<SensorSource> source);

    /// Submits the upkeep transactions when due and returns their receipt ids.
    /// Fetch and submission failures are counted, never thrown.
    std::vector<std::string> run_upkeep(TimestampMs now);

    /// Public mode: ids of requests still pending on the consumer.
    std::vector<std::string> pending_requests() const;

    /// Fulfils each request not already in flight. Failed requests stay
    /// pending for the next call.
    std::vector<std::string> fulfill_pending(const std::vector<std::string>& pending, TimestampMs now);

    /// run_upkeep followed, in public mode, by fulfill_pending.
    std::vector<std::string> tick(TimestampMs now);

    GatewayStats stats() const;
    const GatewayConfig& config() const noexcept { return config_; }
    const UpkeepSchedule& schedule() const noexcept { return schedule_; }

private:
    void record_failure(std::uint64_t GatewayStats::*counter, const std::string& what);
    void prune_in_flight(const std::vector<std::string>& pending);

    GatewayConfig config_;
    std::shared_ptr<consensus::LedgerBackend> backend_;
    std::shared_ptr<SensorSource> source_;
    mutable std::mutex mutex_;
    UpkeepSchedule schedule_;
    GatewayStats stats_;
    std::map<std::string, std::string, std::less<>> in_flight_;  // request id -> receipt id
};

} // namespace twin::oracle
