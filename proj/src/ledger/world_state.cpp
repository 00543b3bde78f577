#include "twin/ledger/world_state.hpp"

#include "twin/ledger/canonical.hpp"

namespace twin::ledger {

const StateEntry* WorldState::find(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

std::uint64_t WorldState::version(std::string_view key) const {
    const auto* e = find(key);
    return e ? e->version : 0;
}

void WorldState::put(const std::string& key, Value value) {
    auto& entry = entries_[key];
    entry.value = std::move(value);
    ++entry.version;
}

Value WorldState::to_json() const {
    Value entries = Value::object();
    for (const auto& [key, e] : entries_) entries[key] = Value{{"value", e.value}, {"version", e.version}};
    return Value{{"entries", std::move(entries)}, {"height", height_}};
}

std::string WorldState::canonical() const {
    return canonical_encode(to_json());
}

namespace {

bool endorsements_satisfy(const Transaction& tx, const ValidationRules& rules) {
    for (const auto& org : rules.required_orgs) {
        bool found = false;
        for (const auto& peer : tx.endorsements) {
            auto it = rules.peer_orgs.find(peer);
            if (it != rules.peer_orgs.end() && it->second == org) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

Amount balance_of(const WorldState& state, std::string_view key) {
    const auto* e = state.find(key);
    return e ? Amount::from_value(e->value) : Amount::zero();
}

} // namespace

ValidationCode apply_transaction(WorldState& state, const Transaction& tx, const ValidationRules& rules) {
    if (!rules.required_orgs.empty() && !endorsements_satisfy(tx, rules)) {
        return ValidationCode::EndorsementPolicyFailure;
    }
    for (const auto& read : tx.read_set) {
        if (state.version(read.key) != read.version) return ValidationCode::MvccReadConflict;
    }
    const bool charge = rules.charge_fees && tx.fee_paid > Amount::zero();
    const std::string balance_key = rules.fee_balance_prefix + tx.submitter;
    if (charge && balance_of(state, balance_key) < tx.fee_paid) {
        return ValidationCode::OutOfFunds;
    }
    for (const auto& w : tx.write_set) state.put(w.key, w.value);
    if (charge) {
        state.put(balance_key, (balance_of(state, balance_key) - tx.fee_paid).to_value());
        state.put(rules.fee_sink_key, (balance_of(state, rules.fee_sink_key) + tx.fee_paid).to_value());
    }
    return ValidationCode::Valid;
}

ApplyResult apply_block(const WorldState& state, const Block& block, const ValidationRules& rules) {
    if (block.header.height != state.height() + 1) {
        throw LedgerError(Errc::HeightGap, "block height " + std::to_string(block.header.height) +
                                               " does not follow state height " + std::to_string(state.height()));
    }
    ApplyResult result{state, {}};
    ValidationRules effective = rules;
    if (block.header.height == 0) effective.required_orgs.clear();
    result.codes.reserve(block.transactions.size());
    for (const auto& tx : block.transactions) result.codes.push_back(apply_transaction(result.state, tx, effective));
    result.state.set_height(block.header.height);
    return result;
}

ApplyResult replay(std::span<const Block> blocks, const ValidationRules& rules) {
    ApplyResult acc;
    for (const auto& b : blocks) {
        auto step = apply_block(acc.state, b, rules);
        acc.state = std::move(step.state);
        acc.codes.insert(acc.codes.end(), step.codes.begin(), step.codes.end());
    }
    return acc;
}

} // namespace twin::ledger
