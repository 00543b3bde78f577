#include "twin/service/http_service.hpp"

#include <httplib.h>

#include "twin/archive/object_store.hpp"
#include "twin/contracts/standard_contracts.hpp"

namespace twin::service {

using contracts::ContractError;

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const Value& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void error(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, Value{{"error", message}});
}

int status_for(ContractError::Kind kind) {
    using K = ContractError::Kind;
    switch (kind) {
    case K::NotAuthorized:
    case K::NotOracle:
        return 403;
    case K::NotFound:
    case K::UnknownThreshold:
    case K::UnknownMethod:
    case K::UnknownContract:
    case K::UnknownRequest:
        return 404;
    case K::BadArgument:
        return 400;
    default:
        return 409;
    }
}

Value block_summary(const ledger::Block& b) {
    return Value{{"hash", b.header.hash().hex()},
                 {"height", b.height()},
                 {"prev_hash", b.header.prev_hash.hex()},
                 {"timestamp", b.header.timestamp},
                 {"tx_count", b.transactions.size()}};
}

Value display(const contracts::BuildingData& d) {
    auto dec = [](std::int64_t v) { return static_cast<double>(v) / 100.0; };
    return Value{{"CO2Level", dec(d.co2_level)},
                 {"humidity", dec(d.humidity)},
                 {"luxLevel", dec(d.lux_level)},
                 {"temperature", dec(d.temperature)}};
}

} // namespace

HttpService::HttpService(std::shared_ptr<TwinNode> node)
    : node_(std::move(node)), hub_(std::make_shared<EventHub>()), server_(std::make_unique<httplib::Server>()) {
    std::weak_ptr<EventHub> weak = hub_;
    node_->backend()->on_commit([weak](const ledger::Block& block, const std::vector<consensus::ContractEvent>& events) {
        auto hub = weak.lock();
        if (!hub) return;
        Value b = block_summary(block);
        b["type"] = "block";
        hub->publish(std::move(b));
        for (const auto& e : events) {
            Value v = e.to_json();
            v["type"] = "event";
            hub->publish(std::move(v));
        }
    });
    node_->controller()->on_decision([weak](const Value& entry) {
        auto hub = weak.lock();
        if (!hub) return;
        Value v = entry;
        v["type"] = "decision";
        hub->publish(std::move(v));
    });
    routes();
}

HttpService::~HttpService() { stop(); }

std::optional<std::string> HttpService::identity_for(const std::string& authorization) const {
    constexpr std::string_view prefix = "Bearer ";
    if (authorization.rfind(prefix, 0) != 0) return std::nullopt;
    const auto& tokens = node_->config().tokens;
    auto it = tokens.find(authorization.substr(prefix.size()));
    if (it == tokens.end()) return std::nullopt;
    return it->second;
}

void HttpService::routes() {
    auto& s = *server_;

    s.Get("/twin", [this](const httplib::Request&, httplib::Response& res) {
        try {
            auto data = node_->twin_data();
            Value body = data.to_json();
            body["display"] = display(data);
            body["height"] = node_->backend()->height();
            reply(res, 200, body);
        } catch (const ContractError& e) {
            error(res, status_for(e.kind()), e.what());
        }
    });

    s.Get("/thresholds", [this](const httplib::Request&, httplib::Response& res) {
        try {
            reply(res, 200, node_->thresholds().to_json());
        } catch (const ContractError& e) {
            error(res, status_for(e.kind()), e.what());
        }
    });

    s.Put(R"(/thresholds/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto who = identity_for(req.get_header_value("Authorization"));
        if (!who) return error(res, 401, "missing or unknown bearer token");
        auto threshold = contracts::parse_threshold(req.matches[1].str());
        if (!threshold) return error(res, 404, "unknown threshold " + req.matches[1].str());
        Value body = Value::parse(req.body, nullptr, false);
        if (!body.is_object() || !body.contains("value") || !body.at("value").is_number_integer()) {
            return error(res, 400, "body must be {\"value\": <integer>}");
        }
        try {
            auto receipt = node_->submit({std::string(contracts::kBuildingAutomationConfig),
                                          "set" + contracts::capitalized_name(*threshold),
                                          Value::array({body.at("value")}), *who});
            reply(res, 202, receipt.to_json());
        } catch (const ContractError& e) {
            error(res, status_for(e.kind()), e.what());
        } catch (const consensus::BackendError& e) {
            error(res, 503, e.what());
        }
    });

    s.Get("/devices", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, node_->simulator()->devices().to_json());
    });

    s.Get("/env", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, Value{{"env", node_->simulator()->env().to_json()},
                              {"sample", node_->simulator()->sample().to_json()}});
    });

    s.Get("/blocks", [this](const httplib::Request& req, httplib::Response& res) {
        const auto tip = node_->backend()->height();
        std::int64_t limit = 20;
        std::int64_t from = -1;
        try {
            if (req.has_param("limit")) limit = std::stoll(req.get_param_value("limit"));
            if (req.has_param("from")) from = std::stoll(req.get_param_value("from"));
        } catch (const std::exception&) {
            return error(res, 400, "from and limit must be integers");
        }
        limit = std::clamp<std::int64_t>(limit, 1, 1000);
        if (from < 0) from = std::max<std::int64_t>(0, tip - limit + 1);
        Value out = Value::array();
        for (std::int64_t h = from; h <= tip && h < from + limit; ++h) {
            if (auto b = node_->backend()->block(h)) out.push_back(block_summary(*b));
        }
        reply(res, 200, Value{{"blocks", out}, {"tip", tip}});
    });

    s.Get(R"(/blocks/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto b = node_->backend()->block(std::stoll(req.matches[1].str()));
        if (!b) return error(res, 404, "no block at height " + req.matches[1].str());
        Value body = b->to_json();
        body["hash"] = b->header.hash().hex();
        reply(res, 200, body);
    });

    s.Get(R"(/tx/([0-9a-fA-F]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1].str();
        auto receipt = node_->backend()->receipt(id);
        auto where = node_->backend()->locate(receipt && !receipt->tx_id.empty() ? receipt->tx_id : id);
        if (!receipt && !where) return error(res, 404, "unknown transaction " + id);
        Value body = Value::object();
        if (receipt) body["receipt"] = receipt->to_json();
        if (where) {
            auto b = node_->backend()->block(where->first);
            body["block_height"] = where->first;
            body["index"] = where->second;
            body["transaction"] = b->transactions.at(where->second).to_json();
            body["validation_code"] = ledger::to_string(b->validation_codes.at(where->second));
        }
        reply(res, 200, body);
    });

    s.Get("/metrics", [this](const httplib::Request&, httplib::Response& res) {
        const auto& backend = node_->backend();
        Value body{{"backend", consensus::to_string(backend->kind())},
                   {"committed_txs", backend->committed_tx_count()},
                   {"control_ticks", node_->controller()->ticks()},
                   {"audit_entries", node_->audit()->size()},
                   {"events_published", hub_->last_seq()},
                   {"gateway", node_->gateway()->stats().to_json()},
                   {"height", backend->height()},
                   {"now", node_->clock()->now_ms()},
                   {"pending", backend->pending_count()}};
        if (auto a = node_->archive()) {
            auto head = a->head();
            body["archive_head"] = head ? Value(head->to_string()) : Value(nullptr);
        }
        reply(res, 200, body);
    });

    s.Get("/archive", [this](const httplib::Request&, httplib::Response& res) {
        auto a = node_->archive();
        if (!a) return error(res, 404, "archive disabled");
        Value out = Value::array();
        for (const auto& [cid, rec] : a->log()) {
            Value r = rec.to_json();
            r["cid"] = cid.to_string();
            r.erase("payload");
            out.push_back(r);
        }
        reply(res, 200, out);
    });

    s.Get(R"(/archive/(sha256:[0-9a-fA-F]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto a = node_->archive();
        if (!a) return error(res, 404, "archive disabled");
        try {
            auto bytes = a->store().get(archive::ContentId::parse(req.matches[1].str()));
            res.set_content(bytes, "application/octet-stream");
        } catch (const archive::ArchiveError& e) {
            using K = archive::ArchiveError::Kind;
            error(res, e.kind() == K::NotFound ? 404 : e.kind() == K::InvalidId ? 400 : 500, e.what());
        }
    });

    s.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
        std::uint64_t after = hub_->last_seq();
        if (req.has_header("Last-Event-ID")) {
            try {
                after = std::stoull(req.get_header_value("Last-Event-ID"));
            } catch (const std::exception&) {
            }
        } else if (req.has_param("after")) {
            after = std::stoull(req.get_param_value("after"));
        }
        auto hub = hub_;
        auto cursor = std::make_shared<std::uint64_t>(after);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [hub, cursor](std::size_t, httplib::DataSink& sink) {
            if (hub->closed()) {
                sink.done();
                return false;
            }
            auto batch = hub->since(*cursor, std::chrono::seconds(15));
            std::string out;
            if (batch.empty()) out = ": heartbeat\n\n";
            for (const auto& e : batch) {
                out += "id: " + std::to_string(e.seq) + "\ndata: " + e.data.dump() + "\n\n";
                *cursor = e.seq;
            }
            return sink.write(out.data(), out.size());
        });
    });

    s.Post("/bench", [this](const httplib::Request& req, httplib::Response& res) {
        Value body = Value::parse(req.body, nullptr, false);
        if (body.is_discarded()) return error(res, 400, "body must be JSON");
        try {
            auto w = BenchWorkload::from_json(body);
            auto result = bench_fresh_node(w, node_->config(), BenchClock::Virtual);
            Value out = result.report.to_json();
            out["table"] = format_table({result.report});
            reply(res, 200, out);
        } catch (const BenchError& e) {
            error(res, 400, e.what());
        } catch (const std::exception& e) {
            error(res, 500, e.what());
        }
    });
}

int HttpService::start(const std::string& host, int port) {
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ <= 0) throw ServiceError(ServiceError::Kind::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    return port_;
}

void HttpService::stop() {
    hub_->close();
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace twin::service
