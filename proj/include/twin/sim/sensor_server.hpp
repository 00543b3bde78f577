#pragma once

#include <memory>
#include <string>
#include <thread>

#include "twin/sim/simulator.hpp"

namespace httplib {
class Server;
}

namespace twin::sim {

/// Serves `GET /` with the simulator's current reading.
class SensorServer {
public:
    explicit SensorServer(std::shared_ptr<const BuildingSimulator> sim);
    ~SensorServer();

    SensorServer(const SensorServer&) = delete;
    SensorServer& operator=(const SensorServer&) = delete;

    /// Binds and starts serving on a background thread; port 0 picks a free
    /// port. Returns the bound port. Throws std::runtime_error on bind failure.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();
    std::string url() const;

private:
    std::shared_ptr<const BuildingSimulator> sim_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    std::string host_;
    int port_ = 0;
};

} // namespace twin::sim
