#include "twin/service/cost_report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "twin/contracts/standard_contracts.hpp"
#include "twin/service/node.hpp"

namespace twin::service {

using ledger::Amount;

namespace {

double usd(const Amount& native, double rate) { return std::round(native.to_double() * rate * 100.0) / 100.0; }

std::string fixed2(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << v;
    return out.str();
}

// Half-up to six decimals for display.
std::string six_dp(const Amount& a) {
    constexpr __int128 step = 1'000'000'000'000;
    const __int128 u = a.units();
    const __int128 r = u >= 0 ? (u + step / 2) / step * step : -((-u + step / 2) / step * step);
    return Amount{r}.to_decimal(6);
}

std::string grouped(std::int64_t n) {
    std::string digits = std::to_string(n);
    for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(static_cast<std::size_t>(i), ",");
    return digits;
}

} // namespace

Value CostRow::to_json() const {
    return Value{{"fee_native", fee_native.to_value()},
                 {"fee_usd", fee_usd},
                 {"gas", gas ? Value(*gas) : Value(nullptr)},
                 {"operation", operation},
                 {"subject", subject},
                 {"unit", unit}};
}

Value CostReport::to_json() const {
    Value rs = Value::array();
    for (const auto& r : rows) rs.push_back(r.to_json());
    return Value{{"per_upkeep_link", per_upkeep_link.to_value()}, {"per_upkeep_usd", per_upkeep_usd}, {"rows", rs}};
}

std::string CostReport::format_table() const {
    std::vector<std::vector<std::string>> cells{{"Operation", "Contract / service", "Gas used", "Fee", "USD"}};
    for (const auto& r : rows) {
        cells.push_back({r.operation, r.subject, r.gas ? grouped(*r.gas) : "-",
                         six_dp(r.fee_native) + " " + r.unit, fixed2(r.fee_usd)});
    }
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream out;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        for (std::size_t i = 0; i < cells[r].size(); ++i) {
            out << (i ? " | " : "") << cells[r][i] << std::string(width[i] - cells[r][i].size(), ' ');
        }
        out << '\n';
        if (r == 0) {
            for (std::size_t i = 0; i < width.size(); ++i) out << (i ? "-+-" : "") << std::string(width[i], '-');
            out << '\n';
        }
    }
    out << "Per data retrieval: " << six_dp(per_upkeep_link) << " LINK = " << fixed2(per_upkeep_usd) << " USD\n";
    return out.str();
}

CostReport cost_report(const consensus::PublicChain& chain, const consensus::ExchangeRates& rates) {
    std::optional<CostRow> deploy_config, deploy_consumer, fund, upkeep;
    const auto price = chain.schedule().gas_price;
    auto deployment = [&](const ledger::Transaction& tx, const char* subject) {
        CostRow row{"Contract deployment", subject, std::nullopt, tx.fee_paid, "ETH", usd(tx.fee_paid, rates.eth_usd)};
        if (price > Amount::zero()) row.gas = static_cast<std::int64_t>(tx.fee_paid.units() / price.units());
        return row;
    };
    for (const auto& block : chain.blocks()) {
        for (std::size_t i = 0; i < block.transactions.size(); ++i) {
            const auto& tx = block.transactions[i];
            if (block.validation_codes.at(i) != ledger::ValidationCode::Valid) continue;
            if (tx.method == contracts::kConstructor) {
                if (tx.contract == contracts::kBuildingAutomationConfig && !deploy_config) {
                    deploy_config = deployment(tx, "BuildingAutomationConfig contract");
                } else if (tx.contract == contracts::kMultiWordConsumer && !deploy_consumer) {
                    deploy_consumer = deployment(tx, "Digital twin contract (MultiWordConsumer)");
                }
            }
            for (const auto& ev : tx.events) {
                if (ev.name == "ChainlinkRequested" && !fund) {
                    const auto fee = Amount::from_value(ev.payload.at("fee"));
                    fund = CostRow{"Digital twin contract fund", "Chainlink request", std::nullopt, fee, "LINK",
                                   usd(fee, rates.link_usd)};
                } else if (ev.name == "UpkeepPerformed" && !upkeep) {
                    const auto fee = Amount::from_value(ev.payload.at("fee"));
                    upkeep = CostRow{"Real-time data retrieval", "Chainlink automation", std::nullopt, fee, "LINK",
                                     usd(fee, rates.link_usd)};
                }
            }
        }
    }
    CostReport report;
    for (auto* row : {&deploy_config, &deploy_consumer, &fund, &upkeep}) {
        if (*row) report.rows.push_back(**row);
    }
    report.per_upkeep_link = (fund ? fund->fee_native : Amount::zero()) + (upkeep ? upkeep->fee_native : Amount::zero());
    report.per_upkeep_usd = usd(report.per_upkeep_link, rates.link_usd);
    return report;
}

CostReport simulate_cost_report(const consensus::ConsensusConfig& config) {
    NodeConfig nc;
    nc.backend = consensus::BackendKind::Public;
    nc.consensus = config;
    nc.gateway.mode = oracle::GatewayMode::PublicRequestFulfill;
    nc.bench_accounts = 0;
    TwinNode node(nc);
    node.bootstrap();
    // One upkeep, then enough slots for the request, fulfilment and charge.
    node.run_for(5 * config.gas.slot_ms, config.gas.slot_ms);
    return cost_report(*node.public_chain(), config.rates);
}

} // namespace twin::service
