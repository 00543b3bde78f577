#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "twin/ledger/amount.hpp"

namespace twin::consensus {

using ledger::Amount;

/// 11.8826 gwei in wei; reproduces both contract-deployment fees of the
/// reference cost table to within 0.5%.
inline constexpr std::int64_t kDefaultGasPriceWei = 11'882'600'000;

struct GasSchedule {
    Amount gas_price{kDefaultGasPriceWei};
    std::map<std::string, std::int64_t, std::less<>> deploy_costs{
        {"BuildingAutomationConfig", 821'489},
        {"MultiWordConsumer", 1'857'505},
        {"DigitalTwinContract", 1'857'505},
    };
    std::int64_t invoke_cost = 50'000;
    std::size_t per_block_tx_cap = 30;
    TimestampMs slot_ms = 1000;
};

struct ExchangeRates {
    double eth_usd = 3283.5;
    double link_usd = 20.2;
};

struct FeeQuote {
    Amount fee;   // native coin, 1e-18 units
    double usd = 0.0;
};

/// fee = gas_used x gas_price exactly; usd = fee x eth_usd.
FeeQuote compute_fee(std::int64_t gas_used, const GasSchedule& schedule, const ExchangeRates& rates = {});

} // namespace twin::consensus
