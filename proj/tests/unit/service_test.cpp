#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <random>

#include "twin/contracts/standard_contracts.hpp"
#include "twin/service/cost_report.hpp"
#include "twin/service/http_service.hpp"

using namespace twin;
using namespace twin::service;
using ledger::Amount;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("twin-service-" + tag + "-" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

BenchError::Kind metrics_error(const std::vector<TxRecord>& records) {
    try {
        compute_metrics("x", records);
    } catch (const BenchError& e) {
        return e.kind();
    }
    FAIL("expected BenchError");
    return BenchError::Kind::InvalidWorkload;
}

} // namespace

TEST_CASE("compute_metrics examples") {
    std::vector<TxRecord> hundred;
    for (int i = 0; i < 100; ++i) {
        const std::int64_t t = i * 2'000'000 / 99;
        hundred.push_back({t, t, true});
    }
    auto r = compute_metrics("w", hundred);
    CHECK(r.throughput_tps == 50.0);
    CHECK(r.send_rate_tps == 50.0);
    CHECK(r.succ == 100);
    CHECK(r.fail == 0);

    auto one = compute_metrics("one", {{0, 30'000, true}});
    CHECK(one.min_latency_s == 0.03);
    CHECK(one.max_latency_s == 0.03);
    CHECK(one.avg_latency_s == 0.03);

    auto mixed = compute_metrics("m", {{0, 10'000, true}, {5'000, 25'000, true}, {10'000, 40'000, true}, {20'000, 21'000, false}});
    CHECK(mixed.avg_latency_s == 0.02);
    CHECK(mixed.succ == 3);
    CHECK(mixed.fail == 1);

    CHECK(metrics_error({}) == BenchError::Kind::EmptyRecords);
    CHECK(metrics_error({{5, 5, true}, {5, 5, true}}) == BenchError::Kind::ZeroWindow);
}

TEST_CASE("report table carries the eight column heads") {
    BenchReport r{"GetBuildingData", 17489, 0, 591.0, 0.03, 0.00, 0.00, 590.9};
    const auto table = format_table({r});
    CHECK(table.find("| Name            | Succ  | Fail | Send Rate (TPS) | Max Latency (s) | Min Latency (s) | "
                     "Avg Latency (s) | Throughput (TPS) |") != std::string::npos);
    CHECK(table.find("| GetBuildingData | 17489 | 0    | 591.0           | 0.03            | 0.00            | "
                     "0.00            | 590.9            |") != std::string::npos);
}

TEST_CASE("records file recomputes the report bitwise") {
    std::mt19937_64 rng(7);
    std::vector<TxRecord> records;
    std::int64_t t = 0;
    for (int i = 0; i < 2000; ++i) {
        t += static_cast<std::int64_t>(rng() % 3000);
        records.push_back({t, t + static_cast<std::int64_t>(rng() % 40'000), rng() % 50 != 0});
    }
    BenchResult result{compute_metrics("random", records), records};
    auto dir = temp_dir("records");
    write_report_files(dir, result);
    auto loaded = read_records(dir / "random.records.csv");
    CHECK(loaded == records);
    CHECK(compute_metrics("random", loaded) == result.report);
    std::ifstream json_in(dir / "random.report.json");
    CHECK(BenchReport::from_json(Value::parse(json_in)) == result.report);
    CHECK(std::filesystem::exists(dir / "random.report.txt"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("workload validation") {
    CHECK_THROWS_AS(BenchWorkload::from_json(Value{{"duration", 0}}), BenchError);
    CHECK_THROWS_AS(BenchWorkload::from_json(Value{{"send_rate", -1}}), BenchError);
    CHECK_THROWS_AS(BenchWorkload::from_json(Value{{"workers", 0}}), BenchError);
    CHECK_THROWS_AS(BenchWorkload::from_json(Value{{"backend", "ledger"}}), BenchError);
    auto w = BenchWorkload::from_json(Value{{"send_rate", 10}, {"duration", 2}, {"backend", "public"}});
    CHECK(w.total() == 20);
    CHECK(w.backend == consensus::BackendKind::Public);
    CHECK(BenchWorkload::from_json(w.to_json()).to_json() == w.to_json());
}

TEST_CASE("virtual benchmarks on both backends") {
    NodeConfig base;
    BenchWorkload reads;
    reads.name = "reads";
    reads.send_rate = 200;
    reads.duration_s = 2;
    auto r = bench_fresh_node(reads, base, BenchClock::Virtual);
    CHECK(r.report.succ == 400);
    CHECK(r.report.fail == 0);
    CHECK(r.report.avg_latency_s == 0.0);

    BenchWorkload writes;
    writes.name = "writes";
    writes.method = "SetBuildingData";
    writes.args = Value::array({2300, 5000, 40000, 30000});
    writes.send_rate = 50;
    writes.duration_s = 2;
    auto w = bench_fresh_node(writes, base, BenchClock::Virtual);
    CHECK(w.report.succ + w.report.fail == 100);
    CHECK(w.report.succ >= 1);
    CHECK(w.report.max_latency_s <= 2.0);

    BenchWorkload pub;
    pub.name = "transfers";
    pub.backend = consensus::BackendKind::Public;
    pub.contract = "LinkToken";
    pub.method = "transfer";
    pub.args = Value::array({"owner", "1"});
    pub.send_rate = 100;
    pub.duration_s = 5;
    auto p = bench_fresh_node(pub, base, BenchClock::Virtual);
    CHECK(p.report.succ == 500);
    CHECK(p.report.throughput_tps <= 33.0);
    CHECK(p.report.throughput_tps >= 27.0);
    CHECK(p.report.throughput_tps <= p.report.send_rate_tps * 1.05);
}

TEST_CASE("cost report reproduces the deployment and LINK rows") {
    auto report = simulate_cost_report({});
    REQUIRE(report.rows.size() == 4);
    auto within = [](double got, double want) { return std::abs(got - want) <= 0.01 * want; };
    CHECK(report.rows[0].gas == 821'489);
    CHECK(within(report.rows[0].fee_native.to_double(), 0.009776));
    CHECK(within(report.rows[0].fee_usd, 32.10));
    CHECK(report.rows[1].gas == 1'857'505);
    CHECK(within(report.rows[1].fee_native.to_double(), 0.022072));
    CHECK(within(report.rows[1].fee_usd, 72.44));
    CHECK(report.rows[2].fee_native == Amount::from_decimal("0.1"));
    CHECK(report.rows[2].fee_usd == 2.02);
    CHECK(report.rows[3].fee_native == Amount::from_decimal("0.235323"));
    CHECK(report.rows[3].fee_usd == 4.75);
    CHECK(report.per_upkeep_link == Amount::from_decimal("0.335323"));
    CHECK(within(report.per_upkeep_usd, 6.76));
    CHECK(report.format_table().find("821,489") != std::string::npos);
}

TEST_CASE("node bootstrap is idempotent across a restart") {
    auto dir = temp_dir("node");
    NodeConfig cfg;
    cfg.data_dir = dir;
    std::int64_t height = 0;
    {
        TwinNode node(cfg);
        node.bootstrap();
        auto data = node.twin_data();
        data.as_of = 0;
        CHECK(data == contracts::kDefaultBuildingData);
        auto th = node.thresholds();
        CHECK(th.owner == "owner");
        CHECK(th.max_temperature == 2600);
        height = node.backend()->height();
    }
    {
        TwinNode node(cfg);
        node.bootstrap();
        CHECK(node.backend()->height() == height);
        node.run_for(60'000);
        CHECK(node.gateway()->stats().upkeeps == 1);
        CHECK(node.controller()->ticks() >= 12);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("node archives every N upkeeps") {
    auto dir = temp_dir("archive");
    NodeConfig cfg;
    cfg.data_dir = dir;
    cfg.snapshot_every = 2;
    cfg.gateway.interval_ms = 5000;
    TwinNode node(cfg);
    node.bootstrap();
    node.run_for(41'000);
    auto log = node.archive()->log();
    CHECK(log.size() == 4);
    auto payload = Value::parse(log.front().second.payload);
    CHECK(payload.at("readings").size() == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("event hub keeps order and resumes") {
    EventHub hub(3);
    for (int i = 0; i < 5; ++i) hub.publish(Value{{"i", i}});
    auto all = hub.since(0);
    REQUIRE(all.size() == 3);
    CHECK(all.front().seq == 3);
    CHECK(all.back().data["i"] == 4);
    CHECK(hub.since(4).size() == 1);
    CHECK(hub.since(5, std::chrono::milliseconds(10)).empty());
}

TEST_CASE("http interface") {
    auto node = std::make_shared<TwinNode>(NodeConfig{});
    node->bootstrap();
    HttpService service(node);
    const int port = service.start("127.0.0.1", 0);
    httplib::Client cli("127.0.0.1", port);

    auto twin_res = cli.Get("/twin");
    REQUIRE(twin_res);
    CHECK(twin_res->status == 200);
    auto twin_body = Value::parse(twin_res->body);
    CHECK(twin_body["display"]["temperature"] == 22.0);
    CHECK(twin_body["display"]["CO2Level"] == 400.0);

    auto genesis = cli.Get("/blocks/0");
    REQUIRE(genesis);
    CHECK(genesis->status == 200);
    CHECK(Value::parse(genesis->body)["header"]["height"] == 0);
    CHECK(cli.Get("/blocks/999")->status == 404);

    const std::string body = R"({"value": 2500})";
    auto anon = cli.Put("/thresholds/maxTemperature", body, "application/json");
    CHECK(anon->status == 401);

    httplib::Headers guest{{"Authorization", "Bearer guest-token"}};
    auto denied = cli.Put("/thresholds/maxTemperature", guest, body, "application/json");
    REQUIRE(denied);
    CHECK(denied->status == 403);
    CHECK(Value::parse(denied->body)["error"] == "Not authorized");

    httplib::Headers owner{{"Authorization", "Bearer owner-token"}};
    CHECK(cli.Put("/thresholds/maxFoo", owner, body, "application/json")->status == 404);
    CHECK(cli.Put("/thresholds/maxTemperature", owner, R"({"value":"x"})", "application/json")->status == 400);

    const auto before = service.events().last_seq();
    auto accepted = cli.Put("/thresholds/maxTemperature", owner, body, "application/json");
    REQUIRE(accepted);
    CHECK(accepted->status == 202);
    const auto receipt_id = Value::parse(accepted->body)["id"].get<std::string>();
    node->settle();
    CHECK(Value::parse(cli.Get("/thresholds")->body)["maxTemperature"] == 2500);

    auto tx = cli.Get("/tx/" + receipt_id);
    REQUIRE(tx);
    CHECK(Value::parse(tx->body)["validation_code"] == "VALID");

    std::string stream;
    httplib::Headers resume{{"Last-Event-ID", std::to_string(before)}};
    cli.Get("/events", resume, [&](const char* data, std::size_t len) {
        stream.append(data, len);
        return stream.find("MaxTemperatureUpdated") == std::string::npos;
    });
    CHECK(stream.find("\"type\":\"block\"") != std::string::npos);
    CHECK(stream.find("MaxTemperatureUpdated") != std::string::npos);

    auto metrics = Value::parse(cli.Get("/metrics")->body);
    CHECK(metrics["height"] == node->backend()->height());
    CHECK(cli.Get("/devices")->status == 200);
    CHECK(cli.Get("/env")->status == 200);
    CHECK(Value::parse(cli.Get("/blocks")->body)["blocks"].size() >= 1);

    auto bench = cli.Post("/bench", R"({"send_rate": 50, "duration": 1})", "application/json");
    REQUIRE(bench);
    CHECK(bench->status == 200);
    CHECK(Value::parse(bench->body)["succ"] == 50);
    CHECK(cli.Post("/bench", R"({"duration": 0})", "application/json")->status == 400);
    service.stop();
}
