#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twin/archive/object_store.hpp"
#include "twin/automation/engine.hpp"
#include "twin/consensus/config.hpp"
#include "twin/consensus/fabric_network.hpp"
#include "twin/consensus/public_chain.hpp"
#include "twin/oracle/gateway.hpp"
#include "twin/service/bench.hpp"
#include "twin/sim/sensor_server.hpp"
#include "twin/sim/simulator.hpp"

namespace twin::service {

/// Flat node configuration. Each module reads its own keys from the same
/// object (see the module config types); node-level keys are listed here.
struct NodeConfig {
    consensus::BackendKind backend = consensus::BackendKind::Permissioned;
    /// Chain store, archive and audit log live under here; empty = in memory.
    std::optional<std::filesystem::path> data_dir;
    std::string http_host = "127.0.0.1";
    int http_port = 8080;
    /// 0 picks a free port. The gateway fetches from this endpoint unless
    /// `sensor_url` is set explicitly.
    int sensor_port = 0;
    bool use_sensor_http = false;

    std::string owner = "owner";
    std::string admin = "admin";
    /// Bearer token -> identity.
    std::map<std::string, std::string> tokens{{"owner-token", "owner"}, {"guest-token", "guest"}};
    contracts::ThresholdConfig thresholds = default_thresholds();
    int snapshot_every = 10;
    int bench_accounts = 8;

    consensus::ConsensusConfig consensus;
    sim::SimConfig sim;
    oracle::GatewayConfig gateway;
    automation::ControllerConfig controller;

    static contracts::ThresholdConfig default_thresholds();
    static NodeConfig from_json(const Value& json);
    static NodeConfig load(const std::filesystem::path& path);
    Value to_json() const;
};

/// Wires the ledger backend, building simulator, oracle gateway, controller
/// and archive around one clock. Time only moves through `step_to`.
class TwinNode {
public:
    explicit TwinNode(NodeConfig config, std::shared_ptr<consensus::VirtualClock> clock = nullptr);
    ~TwinNode();
    TwinNode(const TwinNode&) = delete;
    TwinNode& operator=(const TwinNode&) = delete;

    /// Deploys contracts, seeds the ledger and thresholds. Skips whatever a
    /// resumed chain already holds.
    void bootstrap();

    /// One loop iteration at `now`: plant, upkeep, block production, control
    /// tick, archive cadence.
    void step_to(TimestampMs now);
    /// Steps a virtual run by `step_ms` until `duration_ms` has elapsed.
    void run_for(TimestampMs duration_ms, TimestampMs step_ms = 1000);
    /// Drives the clock from monotonic wall time (scaled by the sim's
    /// realtime_factor) until `stop` is set.
    void run_realtime(const std::atomic<bool>& stop, TimestampMs poll_ms = 100);
    /// Produces blocks until nothing is pending, advancing the clock.
    void settle();

    /// Submits as `identity`, translating backend rejections into exceptions.
    consensus::SubmitReceipt submit(const consensus::Invocation& invocation);
    Value query(const consensus::Invocation& invocation) const;

    contracts::BuildingData twin_data() const;
    contracts::ThresholdConfig thresholds() const;
    std::string data_contract() const;

    const NodeConfig& config() const noexcept { return config_; }
    const std::shared_ptr<consensus::VirtualClock>& clock() const noexcept { return clock_; }
    const std::shared_ptr<consensus::LedgerBackend>& backend() const noexcept { return backend_; }
    std::shared_ptr<consensus::FabricNetwork> fabric() const;
    std::shared_ptr<consensus::PublicChain> public_chain() const;
    const std::shared_ptr<sim::BuildingSimulator>& simulator() const noexcept { return sim_; }
    const std::shared_ptr<oracle::OracleGateway>& gateway() const noexcept { return gateway_; }
    const std::shared_ptr<automation::Controller>& controller() const noexcept { return controller_; }
    const std::shared_ptr<automation::AuditLog>& audit() const noexcept { return audit_; }
    /// Null without a data_dir.
    const std::shared_ptr<archive::SnapshotArchive>& archive() const noexcept { return archive_; }
    /// Sensor endpoint URL when use_sensor_http is set.
    std::string sensor_url() const;
    TimestampMs start_time() const noexcept { return start_; }

private:
    class RecordingSource;

    void snapshot_if_due(TimestampMs now);

    NodeConfig config_;
    std::shared_ptr<consensus::VirtualClock> clock_;
    TimestampMs start_ = 0;
    std::shared_ptr<consensus::LedgerBackend> backend_;
    std::shared_ptr<sim::BuildingSimulator> sim_;
    std::unique_ptr<sim::SensorServer> endpoint_;
    std::shared_ptr<RecordingSource> source_;
    std::shared_ptr<oracle::OracleGateway> gateway_;
    std::shared_ptr<automation::AuditLog> audit_;
    std::shared_ptr<automation::Controller> controller_;
    std::shared_ptr<archive::SnapshotArchive> archive_;
    std::uint64_t upkeeps_at_snapshot_ = 0;
};

/// Bootstraps a throwaway in-memory node shaped like `base` with the
/// workload's backend, then runs the workload against it.
BenchResult bench_fresh_node(const BenchWorkload& workload, NodeConfig base, BenchClock mode);

} // namespace twin::service
