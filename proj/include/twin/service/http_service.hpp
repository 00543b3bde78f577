#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "twin/service/event_hub.hpp"
#include "twin/service/node.hpp"

namespace httplib {
class Server;
}

namespace twin::service {

class ServiceError : public std::runtime_error {
public:
    enum class Kind { BindFailure };

    ServiceError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// HTTP/JSON API and server-sent event stream over a running TwinNode.
///
///   GET  /twin /thresholds /devices /env /metrics
///   GET  /blocks[?from=&limit=]  /blocks/{h}  /tx/{id}
///   GET  /archive  /archive/{cid}
///   GET  /events                 text/event-stream, honours Last-Event-ID
///   PUT  /thresholds/{name}      {"value": int}, bearer token required
///   POST /bench                  BenchWorkload, runs on a fresh virtual node
class HttpService {
public:
    explicit HttpService(std::shared_ptr<TwinNode> node);
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Throws ServiceError(BindFailure).
    int start(const std::string& host, int port);
    void stop();
    int port() const noexcept { return port_; }

    EventHub& events() noexcept { return *hub_; }
    /// Identity for an Authorization header value, if the token is known.
    std::optional<std::string> identity_for(const std::string& authorization) const;

private:
    void routes();

    std::shared_ptr<TwinNode> node_;
    std::shared_ptr<EventHub> hub_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

} // namespace twin::service
