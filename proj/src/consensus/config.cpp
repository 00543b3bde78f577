#include "twin/consensus/config.hpp"

#include <cmath>

namespace twin::consensus {

ConsensusConfig ConsensusConfig::from_json(const Value& json) {
    ConsensusConfig c;
    if (!json.is_object()) return c;
    if (json.contains("orgs")) c.topology.orgs = json.at("orgs").get<std::vector<std::string>>();
    if (json.contains("peers")) {
        c.topology.peers.clear();
        for (const auto& p : json.at("peers")) {
            c.topology.peers.push_back({p.at("name").get<std::string>(), p.at("org").get<std::string>(),
                                        p.value("address", std::string{})});
        }
    }
    if (json.contains("orderer")) c.topology.orderer = json.at("orderer").get<std::string>();
    if (json.contains("channel")) c.topology.channel = json.at("channel").get<std::string>();
    if (json.contains("endorsement_policy")) {
        c.topology.endorsement_policy = json.at("endorsement_policy").get<std::set<std::string>>();
    }
    if (json.contains("max_block_txs")) c.ordering.max_block_txs = json.at("max_block_txs").get<std::size_t>();
    if (json.contains("batch_timeout_ms")) c.ordering.batch_timeout_ms = json.at("batch_timeout_ms").get<TimestampMs>();
    if (json.contains("gas_price_gwei")) {
        c.gas.gas_price = Amount{static_cast<__int128>(std::llround(json.at("gas_price_gwei").get<double>() * 1e9))};
    }
    if (json.contains("invoke_gas")) c.gas.invoke_cost = json.at("invoke_gas").get<std::int64_t>();
    if (json.contains("per_block_tx_cap")) c.gas.per_block_tx_cap = json.at("per_block_tx_cap").get<std::size_t>();
    if (json.contains("slot_ms")) c.gas.slot_ms = json.at("slot_ms").get<TimestampMs>();
    if (json.contains("eth_usd")) c.rates.eth_usd = json.at("eth_usd").get<double>();
    if (json.contains("link_usd")) c.rates.link_usd = json.at("link_usd").get<double>();
    if (c.ordering.max_block_txs == 0) throw std::invalid_argument("max_block_txs must be positive");
    if (c.gas.slot_ms <= 0) throw std::invalid_argument("slot_ms must be positive");
    return c;
}

Value ConsensusConfig::to_json() const {
    Value out = topology.to_json();
    out["max_block_txs"] = ordering.max_block_txs;
    out["batch_timeout_ms"] = ordering.batch_timeout_ms;
    out["gas_price_gwei"] = gas.gas_price.to_double() * 1e9;
    out["invoke_gas"] = gas.invoke_cost;
    out["per_block_tx_cap"] = gas.per_block_tx_cap;
    out["slot_ms"] = gas.slot_ms;
    out["eth_usd"] = rates.eth_usd;
    out["link_usd"] = rates.link_usd;
    return out;
}

} // namespace twin::consensus
