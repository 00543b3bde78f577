#include "twin/contracts/standard_contracts.hpp"

namespace twin::contracts {

using ledger::Amount;
using K = ContractError::Kind;

std::string link_key(std::string_view account) {
    return "link/" + std::string(account);
}

std::string eth_key(std::string_view account) {
    return "eth/" + std::string(account);
}

Amount link_balance(ExecutionContext& ctx, std::string_view account) {
    auto v = ctx.get(link_key(account));
    return v ? Amount::from_value(*v) : Amount::zero();
}

void link_transfer(ExecutionContext& ctx, std::string_view from, std::string_view to, Amount amount) {
    if (amount < Amount::zero()) throw ContractError(K::BadArgument, "negative transfer");
    const Amount from_balance = link_balance(ctx, from);
    if (from_balance < amount) {
        throw ContractError(K::InsufficientBalance, "insufficient LINK balance for " + std::string(from));
    }
    if (from == to) return;
    const Amount to_balance = link_balance(ctx, to);
    ctx.put(link_key(from), (from_balance - amount).to_value());
    ctx.put(link_key(to), (to_balance + amount).to_value());
}

Value LinkToken::invoke(ExecutionContext& ctx, std::string_view method) const {
    if (method == kConstructor) return nullptr;
    if (method == "transfer") {
        Amount amount;
        try {
            amount = Amount::from_units(ctx.arg_string(1));
        } catch (const ledger::LedgerError&) {
            throw ContractError(K::BadArgument, "amount must be an integer number of units");
        }
        link_transfer(ctx, ctx.submitter(), ctx.arg_string(0), amount);
        ctx.emit("Transfer", Value{{"from", ctx.submitter()}, {"to", ctx.arg_string(0)}, {"value", amount.to_value()}});
        return true;
    }
    if (method == "balanceOf") return link_balance(ctx, ctx.arg_string(0)).to_value();
    throw ContractError(K::UnknownMethod, "LinkToken has no method " + std::string(method));
}

bool LinkToken::is_read_only(std::string_view method) const {
    return method == "balanceOf";
}

Value AutomationRegistry::invoke(ExecutionContext& ctx, std::string_view method) const {
    if (method == kConstructor) return nullptr;
    if (method == "chargeUpkeep") {
        const std::string target = ctx.arg_string(0);
        if (!ctx.env().fees_enabled) return "0";
        auto fee_v = ctx.get(std::string(kUpkeepFeeKey));
        const Amount fee = fee_v ? Amount::from_value(*fee_v) : kDefaultUpkeepFee;
        if (link_balance(ctx, target) < fee) {
            throw ContractError(K::InsufficientFee, "upkeep balance below the automation fee");
        }
        link_transfer(ctx, target, kAutomationRegistry, fee);
        ctx.emit("UpkeepPerformed", Value{{"fee", fee.to_value()}, {"target", target}});
        return fee.to_value();
    }
    if (method == "upkeepFee") {
        auto fee_v = ctx.get(std::string(kUpkeepFeeKey));
        return fee_v ? *fee_v : kDefaultUpkeepFee.to_value();
    }
    throw ContractError(K::UnknownMethod, "AutomationRegistry has no method " + std::string(method));
}

bool AutomationRegistry::is_read_only(std::string_view method) const {
    return method == "upkeepFee";
}

} // namespace twin::contracts
