#pragma once

#include <deque>
#include <map>

#include "twin/consensus/backend.hpp"
#include "twin/consensus/gas.hpp"

namespace twin::consensus {

struct Account {
    std::string address;
    Amount eth_balance;
    Amount link_balance;
    bool staked = false;

    Value to_json() const;
};

/// Simplified proof-of-stake chain: FIFO mempool, one proposer per slot chosen
/// round-robin over stakers, per-block transaction cap and gas fees.
class PublicChain final : public LedgerBackend {
public:
    struct Options {
        GasSchedule gas;
        std::vector<Account> genesis_accounts;
        Amount upkeep_fee = Amount::from_decimal("0.235323");
        std::optional<std::filesystem::path> store_dir;
    };

    PublicChain(Options options, std::shared_ptr<const contracts::ContractRegistry> registry,
                std::shared_ptr<Clock> clock);

    /// Pre-flights the call against committed state, then queues it. The fee
    /// is charged at inclusion; an unfunded sender is included as OUT_OF_FUNDS.
    SubmitReceipt public_submit(const Invocation& invocation);

    /// Builds and commits the block for `slot_index`, or nothing when the
    /// mempool is empty. Throws BackendError(NoStakers).
    std::optional<ledger::Block> propose_slot(std::int64_t slot_index);

    std::size_t proposer_index(std::int64_t slot_index) const;
    std::vector<std::string> stakers() const;
    std::int64_t gas_for(const Invocation& invocation) const;

    Account account(std::string_view address) const;
    std::vector<Account> accounts() const;
    Amount fees_collected() const;
    const GasSchedule& schedule() const noexcept { return options_.gas; }
    TimestampMs genesis_time() const noexcept { return genesis_time_; }
    ledger::ValidationRules validation_rules() const;

    BackendKind kind() const override { return BackendKind::Public; }
    SubmitReceipt submit(const Invocation& invocation) override { return public_submit(invocation); }
    Value query(const Invocation& invocation) const override;
    void advance(TimestampMs now) override;
    std::size_t pending_count() const override;

private:
    struct MempoolEntry {
        Invocation invocation;
        std::uint64_t nonce = 0;
        std::string receipt_id;
    };

    std::optional<ledger::Block> propose_locked(std::int64_t slot_index);

    Options options_;
    std::vector<std::string> stakers_;
    TimestampMs genesis_time_ = 0;
    std::int64_t last_slot_ = 0;
    std::deque<MempoolEntry> mempool_;
    std::map<std::string, std::uint64_t, std::less<>> nonces_;
};

} // namespace twin::consensus
