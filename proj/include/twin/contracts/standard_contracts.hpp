#pragma once

#include <string>
#include <string_view>

#include "twin/contracts/runtime.hpp"
#include "twin/ledger/amount.hpp"

namespace twin::contracts {

inline constexpr std::string_view kDigitalTwinContract = "DigitalTwinContract";
inline constexpr std::string_view kBuildingAutomationConfig = "BuildingAutomationConfig";
inline constexpr std::string_view kMultiWordConsumer = "MultiWordConsumer";
inline constexpr std::string_view kLinkToken = "LinkToken";
inline constexpr std::string_view kAutomationRegistry = "AutomationRegistry";

inline constexpr std::string_view kBuildingDataKey = "BuildingData";
inline constexpr std::string_view kBuildingDataNotFound = "Building data not found";
inline constexpr std::string_view kNotAuthorized = "Not authorized";

/// Account holding LINK escrowed for open oracle requests.
inline constexpr std::string_view kOracleEscrow = "OracleEscrow";
/// World-state key of the per-upkeep automation fee, written at genesis.
inline constexpr std::string_view kUpkeepFeeKey = "AutomationRegistry/upkeep_fee";

/// One-tenth of a LINK token, the per-request oracle fee.
inline const ledger::Amount kOracleRequestFee = ledger::Amount::from_decimal("0.1");
/// Per-upkeep automation service charge.
inline const ledger::Amount kDefaultUpkeepFee = ledger::Amount::from_decimal("0.235323");

std::string link_key(std::string_view account);
std::string eth_key(std::string_view account);

ledger::Amount link_balance(ExecutionContext& ctx, std::string_view account);
/// Throws ContractError(InsufficientBalance) when `from` cannot cover `amount`.
void link_transfer(ExecutionContext& ctx, std::string_view from, std::string_view to, ledger::Amount amount);

/// Fabric-style chaincode: InitLedger / SetBuildingData / GetBuildingData.
class DigitalTwinContract final : public Contract {
public:
    std::string_view name() const override { return kDigitalTwinContract; }
    Value invoke(ExecutionContext& ctx, std::string_view method) const override;
    bool is_read_only(std::string_view method) const override;
};

/// Owner-gated min/max comfort bounds with per-field setters, getters and
/// "<Name>Updated" events.
class BuildingAutomationConfig final : public Contract {
public:
    std::string_view name() const override { return kBuildingAutomationConfig; }
    Value invoke(ExecutionContext& ctx, std::string_view method) const override;
    bool is_read_only(std::string_view method) const override;

    static std::string key(std::string_view field);
};

/// Oracle consumer: fetches the four readings in one request/fulfill cycle.
class MultiWordConsumer final : public Contract {
public:
    std::string_view name() const override { return kMultiWordConsumer; }
    Value invoke(ExecutionContext& ctx, std::string_view method) const override;
    bool is_read_only(std::string_view method) const override;

    static std::string key(std::string_view field);
};

class LinkToken final : public Contract {
public:
    std::string_view name() const override { return kLinkToken; }
    Value invoke(ExecutionContext& ctx, std::string_view method) const override;
    bool is_read_only(std::string_view method) const override;
};

/// Time-based automation service: charges the upkeep fee to a consumer.
class AutomationRegistry final : public Contract {
public:
    std::string_view name() const override { return kAutomationRegistry; }
    Value invoke(ExecutionContext& ctx, std::string_view method) const override;
    bool is_read_only(std::string_view method) const override;
};

} // namespace twin::contracts
