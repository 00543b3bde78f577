#pragma once

#include "twin/consensus/gas.hpp"
#include "twin/consensus/topology.hpp"

namespace twin::consensus {

/// Topology and schedules as read from the node's JSON config. Recognized
/// keys: orgs, peers, orderer, channel, endorsement_policy, max_block_txs,
/// batch_timeout_ms, gas_price_gwei, invoke_gas, per_block_tx_cap, slot_ms, eth_usd,
/// link_usd. Missing keys keep their defaults.
struct ConsensusConfig {
    NetworkTopology topology = default_topology();
    OrderingParams ordering;
    GasSchedule gas;
    ExchangeRates rates;

    static ConsensusConfig from_json(const Value& json);
    Value to_json() const;
};

} // namespace twin::consensus
