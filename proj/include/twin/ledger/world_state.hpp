#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "twin/ledger/block.hpp"

namespace twin::ledger {

struct StateEntry {
    Value value;
    std::uint64_t version = 0;

    bool operator==(const StateEntry&) const = default;
};

/// Key-value view of the ledger: the result of applying every block in order.
class WorldState {
public:
    const StateEntry* find(std::string_view key) const;
    /// Current version of `key`, 0 when absent.
    std::uint64_t version(std::string_view key) const;
    void put(const std::string& key, Value value);

    std::int64_t height() const noexcept { return height_; }
    void set_height(std::int64_t h) noexcept { height_ = h; }

    const std::map<std::string, StateEntry, std::less<>>& entries() const noexcept { return entries_; }

    Value to_json() const;
    std::string canonical() const;

    bool operator==(const WorldState&) const = default;

private:
    std::map<std::string, StateEntry, std::less<>> entries_;
    std::int64_t height_ = -1;
};

/// Commit-time checks beyond MVCC. Defaults check nothing extra.
struct ValidationRules {
    /// Every org listed here must have endorsed (permissioned mode).
    std::set<std::string> required_orgs;
    /// Endorser (peer) name -> owning org.
    std::map<std::string, std::string> peer_orgs;
    /// Public mode: debit fee_paid from `fee_balance_prefix + submitter` and
    /// credit it to `fee_sink_key`.
    bool charge_fees = false;
    std::string fee_balance_prefix = "eth/";
    std::string fee_sink_key = "fees/collected";
};

/// Validates one transaction against `state` and applies it when Valid.
/// Invalid transactions leave `state` untouched. Does not change the height.
ValidationCode apply_transaction(WorldState& state, const Transaction& tx, const ValidationRules& rules);

struct ApplyResult {
    WorldState state;
    std::vector<ValidationCode> codes;
};

/// Applies `block` in transaction order. Requires block height = state height + 1
/// (LedgerError HeightGap otherwise). Endorsement rules are not applied to the
/// genesis block, which carries trusted configuration.
ApplyResult apply_block(const WorldState& state, const Block& block, const ValidationRules& rules = {});

/// Replays `blocks` from an empty state.
ApplyResult replay(std::span<const Block> blocks, const ValidationRules& rules = {});

} // namespace twin::ledger
