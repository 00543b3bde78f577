#include "twin/consensus/topology.hpp"

namespace twin::consensus {

const PeerInfo* NetworkTopology::find_peer(std::string_view name) const {
    for (const auto& p : peers) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

Value NetworkTopology::to_json() const {
    Value peers_json = Value::array();
    for (const auto& p : peers) peers_json.push_back(Value{{"address", p.address}, {"name", p.name}, {"org", p.org}});
    return Value{{"channel", channel},
                 {"endorsement_policy", endorsement_policy},
                 {"orderer", orderer},
                 {"orgs", orgs},
                 {"peers", std::move(peers_json)}};
}

NetworkTopology default_topology() {
    NetworkTopology t;
    t.orgs = {"org1.example.com", "org2.example.com"};
    t.peers = {
        {"peer0.org1.example.com", "org1.example.com", "localhost:7051"},
        {"peer0.org2.example.com", "org2.example.com", "localhost:9051"},
    };
    t.orderer = "orderer.example.com";
    t.channel = "mychannel";
    t.endorsement_policy = {"org1.example.com", "org2.example.com"};
    return t;
}

} // namespace twin::consensus
