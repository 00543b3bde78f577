#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "twin/ledger/types.hpp"

namespace twin::consensus {

struct PeerInfo {
    std::string name;
    std::string org;
    std::string address;
};

using EndorsementPolicy = std::set<std::string>;  // orgs that must all endorse

struct NetworkTopology {
    std::vector<std::string> orgs;
    std::vector<PeerInfo> peers;
    std::string orderer;
    std::string channel;
    EndorsementPolicy endorsement_policy;

    const PeerInfo* find_peer(std::string_view name) const;
    Value to_json() const;
};

/// Two orgs with one peer each, a single orderer and channel "mychannel";
/// both orgs must endorse.
NetworkTopology default_topology();

/// Block cutting: a batch is cut at `max_block_txs` pending transactions or
/// when the oldest pending transaction has waited `batch_timeout_ms`.
struct OrderingParams {
    std::size_t max_block_txs = 10;
    TimestampMs batch_timeout_ms = 2000;
};

} // namespace twin::consensus
