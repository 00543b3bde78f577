#include "twin/sim/sensor_server.hpp"

#include <httplib.h>

namespace twin::sim {

SensorServer::SensorServer(std::shared_ptr<const BuildingSimulator> sim)
    : sim_(std::move(sim)), server_(std::make_unique<httplib::Server>()) {
    server_->Get("/", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(sim_->sample().to_json().dump(), "application/json");
    });
}

SensorServer::~SensorServer() {
    stop();
}

int SensorServer::start(const std::string& host, int port) {
    host_ = host;
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw std::runtime_error("sensor endpoint cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void SensorServer::stop() {
    if (thread_.joinable()) {
        server_->stop();
        thread_.join();
    }
}

std::string SensorServer::url() const {
    return "http://" + host_ + ":" + std::to_string(port_) + "/";
}

} // namespace twin::sim
