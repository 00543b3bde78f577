// twinctl: node runner and client for the building digital twin.

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "twin/archive/object_store.hpp"
#include "twin/ledger/block_store.hpp"
#include "twin/service/cost_report.hpp"
#include "twin/service/http_service.hpp"

using namespace twin;
using namespace twin::service;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

NodeConfig load_config(const std::string& path) {
    return path.empty() ? NodeConfig{} : NodeConfig::load(path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

httplib::Client client(const std::string& url) {
    httplib::Client cli(url);
    cli.set_connection_timeout(5);
    cli.set_read_timeout(120);
    return cli;
}

int print_response(const httplib::Result& res) {
    if (!res) {
        std::cerr << "request failed: " << httplib::to_string(res.error()) << '\n';
        return 2;
    }
    auto body = Value::parse(res->body, nullptr, false);
    std::cout << (body.is_discarded() ? res->body : body.dump(2)) << '\n';
    return res->status < 300 ? 0 : 1;
}

std::filesystem::path archive_root(const std::string& root, const std::string& config) {
    if (!root.empty()) return root;
    auto cfg = load_config(config);
    if (!cfg.data_dir) throw std::runtime_error("pass --root or a config with data_dir");
    return *cfg.data_dir / "archive";
}

int node_start(const std::string& config_path, const std::string& backend) {
    auto cfg = load_config(config_path);
    if (!backend.empty()) {
        Value patch = cfg.to_json();
        patch["backend"] = backend;
        patch.erase("mode");
        cfg = NodeConfig::from_json(patch);
    }
    const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
    auto node = std::make_shared<TwinNode>(cfg, std::make_shared<consensus::VirtualClock>(wall));
    node->bootstrap();
    HttpService service(node);
    const int port = service.start(cfg.http_host, cfg.http_port);
    std::cout << "backend " << consensus::to_string(cfg.backend) << ", height " << node->backend()->height() << '\n'
              << "api http://" << cfg.http_host << ':' << port << '\n';
    if (cfg.use_sensor_http) std::cout << "sensor " << node->sensor_url() << '\n';
    std::cout.flush();
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    node->run_realtime(g_stop);
    service.stop();
    return 0;
}

int bench_run(const std::string& workload_path, const std::string& config, const std::string& out_dir, bool real) {
    auto workload = BenchWorkload::from_json(Value::parse(read_file(workload_path)));
    auto result = bench_fresh_node(workload, load_config(config), real ? BenchClock::Real : BenchClock::Virtual);
    write_report_files(out_dir, result);
    std::cout << format_table({result.report});
    return 0;
}

int explorer(std::int64_t height, const std::string& url, const std::string& data_dir) {
    if (data_dir.empty()) return print_response(client(url).Get("/blocks/" + std::to_string(height)));
    ledger::BlockStore store(std::filesystem::path(data_dir) / "chain");
    auto block = store.load(height);
    if (!block) {
        std::cerr << "no block at height " << height << '\n';
        return 1;
    }
    Value body = block->to_json();
    body["hash"] = block->header.hash().hex();
    std::cout << body.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Building digital twin node and client"};
    app.require_subcommand(1);
    std::string url = "http://127.0.0.1:8080";
    std::string token;
    std::string config;
    app.add_option("--url", url, "API base URL");
    app.add_option("--token", token, "Bearer token");

    auto* node = app.add_subcommand("node", "Run a node");
    auto* node_start_cmd = node->add_subcommand("start", "Start the node and API");
    std::string backend;
    node_start_cmd->add_option("--config", config, "Node config JSON");
    node_start_cmd->add_option("--backend", backend, "permissioned or public")
        ->check(CLI::IsMember({"permissioned", "public"}));
    node->require_subcommand(1);

    auto* twin = app.add_subcommand("twin", "Digital twin state");
    auto* twin_get = twin->add_subcommand("get", "Print the committed building data");
    twin->require_subcommand(1);

    auto* threshold = app.add_subcommand("threshold", "Comfort thresholds");
    auto* threshold_set = threshold->add_subcommand("set", "Set one threshold (scaled by 100)");
    std::string name;
    std::int64_t value = 0;
    threshold_set->add_option("name", name)->required();
    threshold_set->add_option("value", value)->required();
    threshold->require_subcommand(1);

    auto* bench = app.add_subcommand("bench", "Benchmark harness");
    auto* bench_run_cmd = bench->add_subcommand("run", "Run a workload file");
    std::string workload;
    std::string out_dir = ".";
    bool real = false;
    bench_run_cmd->add_option("workload", workload)->required();
    bench_run_cmd->add_option("--config", config);
    bench_run_cmd->add_option("--out", out_dir, "Report directory");
    bench_run_cmd->add_flag("--real", real, "Use wall-clock time");
    bench->require_subcommand(1);

    auto* cost = app.add_subcommand("cost", "Transaction cost");
    auto* cost_report_cmd = cost->add_subcommand("report", "Deployment and oracle costs on the public backend");
    bool as_json = false;
    cost_report_cmd->add_option("--config", config);
    cost_report_cmd->add_flag("--json", as_json);
    cost->require_subcommand(1);

    auto* arch = app.add_subcommand("archive", "Content-addressed archive");
    std::string root;
    arch->add_option("--root", root, "Archive directory");
    arch->add_option("--config", config);
    auto* arch_put = arch->add_subcommand("put", "Store a file");
    std::string file;
    arch_put->add_option("file", file)->required();
    auto* arch_get = arch->add_subcommand("get", "Fetch an object");
    std::string cid;
    std::string output;
    arch_get->add_option("cid", cid)->required();
    arch_get->add_option("-o,--output", output);
    auto* arch_log = arch->add_subcommand("log", "Walk the snapshot chain");
    arch->require_subcommand(1);

    auto* expl = app.add_subcommand("explorer", "Show a block");
    std::int64_t height = 0;
    std::string data_dir;
    expl->add_option("height", height)->required();
    expl->add_option("--data-dir", data_dir, "Read the block store directly");

    CLI11_PARSE(app, argc, argv);

    try {
        if (node_start_cmd->parsed()) return node_start(config, backend);
        if (twin_get->parsed()) return print_response(client(url).Get("/twin"));
        if (threshold_set->parsed()) {
            httplib::Headers headers{{"Authorization", "Bearer " + token}};
            return print_response(client(url).Put("/thresholds/" + name, headers, Value{{"value", value}}.dump(),
                                                  "application/json"));
        }
        if (bench_run_cmd->parsed()) return bench_run(workload, config, out_dir, real);
        if (cost_report_cmd->parsed()) {
            auto report = simulate_cost_report(load_config(config).consensus);
            std::cout << (as_json ? report.to_json().dump(2) + "\n" : report.format_table());
            return 0;
        }
        if (arch->parsed()) {
            archive::SnapshotArchive a(archive_root(root, config));
            if (arch_put->parsed()) {
                std::cout << a.store().put(read_file(file)).to_string() << '\n';
            } else if (arch_get->parsed()) {
                auto bytes = a.store().get(archive::ContentId::parse(cid));
                if (output.empty()) {
                    std::cout << bytes;
                } else {
                    std::ofstream(output, std::ios::binary) << bytes;
                }
            } else if (arch_log->parsed()) {
                for (const auto& [id, rec] : a.log()) {
                    std::cout << id.to_string() << ' ' << rec.kind << ' ' << rec.from_ts << ".." << rec.to_ts << '\n';
                }
            }
            return 0;
        }
        if (expl->parsed()) return explorer(height, url, data_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
