#include "twin/service/node.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include "twin/contracts/standard_contracts.hpp"
#include "twin/oracle/sensor_source.hpp"

namespace twin::service {

using consensus::BackendKind;
using contracts::kBuildingAutomationConfig;
using contracts::kDigitalTwinContract;
using contracts::kMultiWordConsumer;
using ledger::Amount;

contracts::ThresholdConfig NodeConfig::default_thresholds() {
    contracts::ThresholdConfig t;
    t.min_temperature = 1800;
    t.max_temperature = 2600;
    t.min_co2_level = 0;
    t.max_co2_level = 100000;
    t.min_lux_level = 20000;
    t.max_lux_level = 100000;
    t.min_humidity = 3000;
    t.max_humidity = 7000;
    return t;
}

NodeConfig NodeConfig::from_json(const Value& json) {
    NodeConfig c;
    if (!json.is_object()) throw std::invalid_argument("node config must be a JSON object");
    if (json.contains("backend")) {
        const auto b = json.at("backend").get<std::string>();
        if (b == "permissioned") {
            c.backend = BackendKind::Permissioned;
        } else if (b == "public") {
            c.backend = BackendKind::Public;
        } else {
            throw std::invalid_argument("unknown backend " + b);
        }
    }
    if (json.contains("data_dir") && !json.at("data_dir").is_null()) {
        c.data_dir = json.at("data_dir").get<std::string>();
    }
    c.http_host = json.value("http_host", c.http_host);
    c.http_port = json.value("http_port", c.http_port);
    c.sensor_port = json.value("sensor_port", c.sensor_port);
    c.use_sensor_http = json.value("use_sensor_http", c.use_sensor_http);
    c.owner = json.value("owner", c.owner);
    c.admin = json.value("admin", c.admin);
    if (json.contains("tokens")) c.tokens = json.at("tokens").get<std::map<std::string, std::string>>();
    if (json.contains("thresholds")) {
        for (const auto& [name, value] : json.at("thresholds").items()) {
            auto t = contracts::parse_threshold(name);
            if (!t) throw std::invalid_argument("unknown threshold " + name);
            c.thresholds.set(*t, value.get<std::int64_t>());
        }
    }
    c.snapshot_every = json.value("snapshot_every", c.snapshot_every);
    if (c.snapshot_every < 1) throw std::invalid_argument("snapshot_every must be at least 1");
    c.bench_accounts = json.value("bench_accounts", c.bench_accounts);

    c.consensus = consensus::ConsensusConfig::from_json(json);
    c.sim = sim::SimConfig::from_json(json);
    c.gateway = oracle::GatewayConfig::from_json(json);
    if (!json.contains("mode")) {
        c.gateway.mode = c.backend == BackendKind::Public ? oracle::GatewayMode::PublicRequestFulfill
                                                          : oracle::GatewayMode::PermissionedDirect;
    }
    c.controller = automation::ControllerConfig::from_json(json);
    return c;
}

NodeConfig NodeConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    return from_json(Value::parse(in));
}

Value NodeConfig::to_json() const {
    Value out = consensus.to_json();
    out.update(sim.to_json());
    out.update(gateway.to_json());
    out.update(controller.to_json());
    out["backend"] = consensus::to_string(backend);
    out["data_dir"] = data_dir ? Value(data_dir->string()) : Value(nullptr);
    out["http_host"] = http_host;
    out["http_port"] = http_port;
    out["sensor_port"] = sensor_port;
    out["use_sensor_http"] = use_sensor_http;
    out["owner"] = owner;
    out["admin"] = admin;
    out["tokens"] = tokens;
    Value th = Value::object();
    for (auto t : contracts::kAllThresholds) th[std::string(contracts::field_name(t))] = thresholds.get(t);
    out["thresholds"] = th;
    out["snapshot_every"] = snapshot_every;
    out["bench_accounts"] = bench_accounts;
    return out;
}

/// Passes readings through and keeps them for the next archive snapshot.
class TwinNode::RecordingSource final : public oracle::SensorSource {
public:
    explicit RecordingSource(std::shared_ptr<oracle::SensorSource> inner) : inner_(std::move(inner)) {}

    contracts::BuildingData fetch(TimestampMs now) override {
        auto data = inner_->fetch(now);
        std::lock_guard lock(mutex_);
        history_.push_back(data);
        return data;
    }

    std::vector<contracts::BuildingData> drain() {
        std::lock_guard lock(mutex_);
        return std::exchange(history_, {});
    }

private:
    std::shared_ptr<oracle::SensorSource> inner_;
    std::mutex mutex_;
    std::vector<contracts::BuildingData> history_;
};

TwinNode::TwinNode(NodeConfig config, std::shared_ptr<consensus::VirtualClock> clock)
    : config_(std::move(config)),
      clock_(clock ? std::move(clock) : std::make_shared<consensus::VirtualClock>()),
      start_(clock_->now_ms()) {
    auto registry = contracts::standard_registry();
    std::optional<std::filesystem::path> store_dir;
    if (config_.data_dir) {
        std::filesystem::create_directories(*config_.data_dir);
        store_dir = *config_.data_dir / "chain";
    }

    if (config_.backend == BackendKind::Permissioned) {
        consensus::FabricNetwork::Options o{config_.consensus.topology, config_.consensus.ordering, store_dir};
        auto net = std::make_shared<consensus::FabricNetwork>(o, registry, clock_);
        net->install(kDigitalTwinContract);
        net->install(kBuildingAutomationConfig);
        backend_ = net;
    } else {
        consensus::PublicChain::Options o;
        o.gas = config_.consensus.gas;
        o.store_dir = store_dir;
        const Amount hundred = Amount::from_decimal("100");
        o.genesis_accounts = {
            {config_.owner, hundred, hundred, false},
            {config_.gateway.gateway_identity, hundred, Amount::zero(), false},
            {config_.gateway.oracle_identity, Amount::from_decimal("10"), Amount::zero(), false},
            {"validator-1", Amount::zero(), Amount::zero(), true},
            {"validator-2", Amount::zero(), Amount::zero(), true},
            {"validator-3", Amount::zero(), Amount::zero(), true},
        };
        if (config_.admin != config_.owner) o.genesis_accounts.push_back({config_.admin, hundred, Amount::zero(), false});
        for (int i = 0; i < config_.bench_accounts; ++i) {
            o.genesis_accounts.push_back({"bench-" + std::to_string(i), hundred, hundred, false});
        }
        backend_ = std::make_shared<consensus::PublicChain>(o, registry, clock_);
    }

    sim_ = std::make_shared<sim::BuildingSimulator>(config_.sim);
    std::shared_ptr<oracle::SensorSource> inner;
    if (config_.use_sensor_http) {
        endpoint_ = std::make_unique<sim::SensorServer>(sim_);
        endpoint_->start("127.0.0.1", config_.sensor_port);
        config_.gateway.sensor_url = endpoint_->url();
        inner = std::make_shared<oracle::HttpSensorSource>(config_.gateway.sensor_url);
    } else {
        inner = std::make_shared<oracle::SimulatorSensorSource>(sim_);
    }
    source_ = std::make_shared<RecordingSource>(inner);
    gateway_ = std::make_shared<oracle::OracleGateway>(config_.gateway, backend_, source_);

    std::optional<std::filesystem::path> audit_path;
    if (config_.data_dir) audit_path = *config_.data_dir / "audit.jsonl";
    audit_ = std::make_shared<automation::AuditLog>(audit_path);
    controller_ = std::make_shared<automation::Controller>(
        config_.controller, std::make_shared<automation::BackendTwinReader>(backend_), sim_, audit_);
    if (config_.data_dir) archive_ = std::make_shared<archive::SnapshotArchive>(*config_.data_dir / "archive");
}

TwinNode::~TwinNode() {
    if (endpoint_) endpoint_->stop();
}

std::shared_ptr<consensus::FabricNetwork> TwinNode::fabric() const {
    return std::dynamic_pointer_cast<consensus::FabricNetwork>(backend_);
}

std::shared_ptr<consensus::PublicChain> TwinNode::public_chain() const {
    return std::dynamic_pointer_cast<consensus::PublicChain>(backend_);
}

std::string TwinNode::sensor_url() const { return endpoint_ ? endpoint_->url() : std::string(); }

std::string TwinNode::data_contract() const {
    return std::string(config_.backend == BackendKind::Public ? kMultiWordConsumer : kDigitalTwinContract);
}

void TwinNode::bootstrap() {
    const auto state = backend_->state();
    auto deployed = [&](std::string_view c) { return state.find(contracts::deployed_key(c)) != nullptr; };
    const bool fresh_config = !deployed(kBuildingAutomationConfig);
    const Value none = Value::array();

    if (config_.backend == BackendKind::Permissioned) {
        if (!deployed(kDigitalTwinContract)) {
            submit({std::string(kDigitalTwinContract), "constructor", none, config_.admin});
        }
        if (fresh_config) submit({std::string(kBuildingAutomationConfig), "constructor", none, config_.owner});
        settle();
        if (!state.find(contracts::kBuildingDataKey)) {
            submit({std::string(kDigitalTwinContract), "InitLedger", none, config_.admin});
        }
    } else {
        const bool fresh_consumer = !deployed(kMultiWordConsumer);
        if (fresh_config) submit({std::string(kBuildingAutomationConfig), "constructor", none, config_.owner});
        if (fresh_consumer) {
            submit({std::string(kMultiWordConsumer), "constructor", Value::array({config_.gateway.oracle_identity}),
                    config_.owner});
        }
        settle();
        if (fresh_consumer) {
            submit({std::string(contracts::kLinkToken), "transfer",
                    Value::array({std::string(kMultiWordConsumer), config_.gateway.consumer_funding_link.to_string()}),
                    config_.owner});
        }
    }
    if (fresh_config) {
        for (auto t : contracts::kAllThresholds) {
            submit({std::string(kBuildingAutomationConfig), "set" + contracts::capitalized_name(t),
                    Value::array({config_.thresholds.get(t)}), config_.owner});
        }
    }
    settle();
}

void TwinNode::settle() {
    const TimestampMs step = config_.backend == BackendKind::Permissioned ? config_.consensus.ordering.batch_timeout_ms
                                                                          : config_.consensus.gas.slot_ms;
    for (int i = 0; i < 10'000 && backend_->pending_count() > 0; ++i) {
        clock_->advance(step);
        backend_->advance(clock_->now_ms());
    }
}

consensus::SubmitReceipt TwinNode::submit(const consensus::Invocation& invocation) {
    return backend_->submit(invocation);
}

Value TwinNode::query(const consensus::Invocation& invocation) const { return backend_->query(invocation); }

contracts::BuildingData TwinNode::twin_data() const {
    const bool pub = config_.backend == BackendKind::Public;
    return contracts::BuildingData::from_json(
        query({data_contract(), pub ? "getBuildingData" : "GetBuildingData", Value::array(), "service"}));
}

contracts::ThresholdConfig TwinNode::thresholds() const {
    contracts::ThresholdConfig out;
    for (auto t : contracts::kAllThresholds) {
        out.set(t, query({std::string(kBuildingAutomationConfig), "get" + contracts::capitalized_name(t),
                          Value::array(), "service"})
                       .get<std::int64_t>());
    }
    out.owner = query({std::string(kBuildingAutomationConfig), "owner", Value::array(), "service"}).get<std::string>();
    return out;
}

void TwinNode::step_to(TimestampMs now) {
    if (now > clock_->now_ms()) clock_->set(now);
    now = clock_->now_ms();
    sim_->advance_to(now - start_);
    gateway_->tick(now);
    backend_->advance(now);
    controller_->maybe_tick(now);
    snapshot_if_due(now);
}

void TwinNode::run_for(TimestampMs duration_ms, TimestampMs step_ms) {
    const TimestampMs end = clock_->now_ms() + duration_ms;
    while (clock_->now_ms() < end) step_to(std::min(end, clock_->now_ms() + step_ms));
}

void TwinNode::run_realtime(const std::atomic<bool>& stop, TimestampMs poll_ms) {
    using steady = std::chrono::steady_clock;
    const auto wall0 = steady::now();
    const TimestampMs virt0 = clock_->now_ms();
    const double factor = config_.sim.realtime_factor;
    while (!stop.load()) {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(steady::now() - wall0).count();
        step_to(virt0 + static_cast<TimestampMs>(static_cast<double>(elapsed) * factor));
        std::this_thread::sleep_for(std::chrono::milliseconds(poll_ms));
    }
}

void TwinNode::snapshot_if_due(TimestampMs now) {
    if (!archive_) return;
    const auto upkeeps = gateway_->stats().upkeeps;
    if (upkeeps < upkeeps_at_snapshot_ + static_cast<std::uint64_t>(config_.snapshot_every)) return;
    upkeeps_at_snapshot_ = upkeeps;
    archive_->snapshot(source_->drain(), backend_->state(), now);
}

BenchResult bench_fresh_node(const BenchWorkload& workload, NodeConfig base, BenchClock mode) {
    workload.validate();
    base.backend = workload.backend;
    base.data_dir.reset();
    base.use_sensor_http = false;
    base.bench_accounts = std::max(base.bench_accounts, workload.workers);
    base.gateway.mode = base.backend == BackendKind::Public ? oracle::GatewayMode::PublicRequestFulfill
                                                            : oracle::GatewayMode::PermissionedDirect;
    TwinNode node(base);
    node.bootstrap();
    return run_benchmark(workload, *node.backend(), mode, node.clock().get());
}

} // namespace twin::service
