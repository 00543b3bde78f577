#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twin/consensus/config.hpp"
#include "twin/consensus/public_chain.hpp"

namespace twin::service {

struct CostRow {
    std::string operation;
    std::string subject;
    std::optional<std::int64_t> gas;
    ledger::Amount fee_native;
    std::string unit;  // "ETH" or "LINK"
    double fee_usd = 0.0;  // 2 dp

    Value to_json() const;
};

struct CostReport {
    std::vector<CostRow> rows;
    /// Request fee plus automation charge for one data retrieval.
    ledger::Amount per_upkeep_link;
    double per_upkeep_usd = 0.0;

    Value to_json() const;
    std::string format_table() const;
};

/// Builds the four rows from a public chain that has seen both deployments,
/// the consumer funding transfer and at least one upkeep. Rows whose
/// operation has not happened yet are omitted.
CostReport cost_report(const consensus::PublicChain& chain, const consensus::ExchangeRates& rates);

/// Runs a fresh virtual-clock public node through deployment, funding and one
/// upkeep, then reports.
CostReport simulate_cost_report(const consensus::ConsensusConfig& config);

} // namespace twin::service
