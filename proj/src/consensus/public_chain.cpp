#include "twin/consensus/public_chain.hpp"

#include <algorithm>

#include "twin/contracts/standard_contracts.hpp"
#include "twin/ledger/canonical.hpp"

namespace twin::consensus {

using ledger::Block;
using ledger::Transaction;

namespace {

constexpr std::string_view kGenesisSubmitter = "_genesis";

Amount balance(const ledger::WorldState& state, const std::string& key) {
    const auto* e = state.find(key);
    return e ? Amount::from_value(e->value) : Amount::zero();
}

Transaction genesis_transaction(const PublicChain::Options& options) {
    Transaction tx;
    tx.contract = "_genesis";
    tx.method = "genesis";
    tx.submitter = std::string(kGenesisSubmitter);
    std::vector<std::string> stakers;
    for (const auto& a : options.genesis_accounts) {
        tx.write_set.push_back({contracts::eth_key(a.address), a.eth_balance.to_value()});
        tx.write_set.push_back({contracts::link_key(a.address), a.link_balance.to_value()});
        if (a.staked) stakers.push_back(a.address);
    }
    tx.write_set.push_back({"chain/stakers", ledger::canonical_encode(Value(stakers))});
    tx.write_set.push_back({contracts::deployed_key(contracts::kLinkToken), std::string(kGenesisSubmitter)});
    tx.write_set.push_back({contracts::deployed_key(contracts::kAutomationRegistry), std::string(kGenesisSubmitter)});
    tx.write_set.push_back({std::string(contracts::kUpkeepFeeKey), options.upkeep_fee.to_value()});
    tx.seal();
    return tx;
}

} // namespace

Value Account::to_json() const {
    return Value{{"address", address},
                 {"eth_balance", eth_balance.to_decimal(18)},
                 {"link_balance", link_balance.to_decimal(18)},
                 {"staked", staked}};
}

PublicChain::PublicChain(Options options, std::shared_ptr<const contracts::ContractRegistry> registry,
                         std::shared_ptr<Clock> clock)
    : LedgerBackend(std::move(registry), std::move(clock), options.store_dir), options_(std::move(options)) {
    auto persisted = load_persisted();
    const auto rules = validation_rules();
    if (persisted.empty()) {
        genesis_time_ = clock_->now_ms();
        auto genesis = ledger::build_block(std::nullopt, {genesis_transaction(options_)}, genesis_time_);
        auto applied = ledger::apply_block(state_, genesis, rules);
        genesis.validation_codes = applied.codes;
        commit_locked(std::move(genesis), std::move(applied.state));
    } else {
        genesis_time_ = persisted.front().header.timestamp;
        ledger::WorldState state;
        for (auto& b : persisted) {
            auto applied = ledger::apply_block(state, b, rules);
            if (applied.codes != b.validation_codes) {
                throw ledger::LedgerError(ledger::Errc::Storage, "stored validation codes disagree with replay at height " +
                                                                     std::to_string(b.height()));
            }
            state = std::move(applied.state);
            for (const auto& tx : b.transactions) {
                auto& next = nonces_[tx.submitter];
                next = std::max(next, tx.nonce + 1);
            }
            commit_locked(std::move(b), state, false);
        }
        last_slot_ = (chain_.back().header.timestamp - genesis_time_) / options_.gas.slot_ms;
    }
    if (const auto* e = state_.find("chain/stakers")) {
        stakers_ = Value::parse(e->value.get<std::string>()).get<std::vector<std::string>>();
    }
}

ledger::ValidationRules PublicChain::validation_rules() const {
    ledger::ValidationRules rules;
    rules.charge_fees = true;
    return rules;
}

std::int64_t PublicChain::gas_for(const Invocation& invocation) const {
    if (invocation.method == contracts::kConstructor) {
        auto it = options_.gas.deploy_costs.find(invocation.contract);
        if (it != options_.gas.deploy_costs.end()) return it->second;
    }
    return options_.gas.invoke_cost;
}

SubmitReceipt PublicChain::public_submit(const Invocation& invocation) {
    {
        std::shared_lock lock(mutex_);
        if (!state_.find(contracts::eth_key(invocation.submitter))) {
            throw BackendError(BackendError::Kind::UnknownAccount, "unknown account " + invocation.submitter);
        }
        contracts::ExecEnv env{clock_->now_ms(), state_.height() + 1, true};
        contracts::execute(*registry_, state_, invocation, env);
    }
    std::unique_lock lock(mutex_);
    MempoolEntry entry{invocation, nonces_[invocation.submitter]++, {}};
    Value key = invocation.to_json();
    key["nonce"] = entry.nonce;
    entry.receipt_id = ledger::digest(ledger::canonical_encode(key)).hex();
    SubmitReceipt receipt{entry.receipt_id, TxStatus::Pending, {}, std::nullopt, std::nullopt, {}};
    receipts_[entry.receipt_id] = receipt;
    mempool_.push_back(std::move(entry));
    return receipt;
}

std::size_t PublicChain::proposer_index(std::int64_t slot_index) const {
    if (stakers_.empty()) throw BackendError(BackendError::Kind::NoStakers, "no stakers");
    return static_cast<std::size_t>(slot_index % static_cast<std::int64_t>(stakers_.size()));
}

std::vector<std::string> PublicChain::stakers() const {
    return stakers_;
}

std::optional<Block> PublicChain::propose_slot(std::int64_t slot_index) {
    std::optional<Block> block;
    {
        std::unique_lock lock(mutex_);
        block = propose_locked(slot_index);
        last_slot_ = std::max(last_slot_, slot_index);
    }
    if (block) notify({*block});
    return block;
}

std::optional<Block> PublicChain::propose_locked(std::int64_t slot_index) {
    if (mempool_.empty()) return std::nullopt;
    const std::string proposer = stakers_.at(proposer_index(slot_index));
    const TimestampMs ts = genesis_time_ + slot_index * options_.gas.slot_ms;
    const auto rules = validation_rules();
    const contracts::ExecEnv env{ts, state_.height() + 1, true};

    ledger::WorldState working = state_;
    std::vector<Transaction> txs;
    std::vector<std::string> receipt_ids;
    while (!mempool_.empty() && txs.size() < options_.gas.per_block_tx_cap) {
        MempoolEntry entry = std::move(mempool_.front());
        mempool_.pop_front();
        Transaction tx;
        tx.contract = entry.invocation.contract;
        tx.method = entry.invocation.method;
        tx.args = entry.invocation.args;
        tx.submitter = entry.invocation.submitter;
        tx.nonce = entry.nonce;
        tx.endorsements = {proposer};
        tx.fee_paid = compute_fee(gas_for(entry.invocation), options_.gas).fee;
        if (balance(working, rules.fee_balance_prefix + tx.submitter) >= tx.fee_paid) {
            try {
                auto result = contracts::execute(*registry_, working, entry.invocation, env);
                tx.read_set = std::move(result.read_set);
                tx.write_set = std::move(result.write_set);
                tx.events = std::move(result.events);
            } catch (const contracts::ContractError& e) {
                auto& r = receipts_[entry.receipt_id];
                r.status = TxStatus::Failed;
                r.error = e.what();
                continue;
            }
        }
        tx.seal();
        ledger::apply_transaction(working, tx, rules);
        txs.push_back(std::move(tx));
        receipt_ids.push_back(entry.receipt_id);
    }
    if (txs.empty()) return std::nullopt;

    std::optional<ledger::BlockHeader> tip;
    if (!chain_.empty()) tip = chain_.back().header;
    auto block = ledger::build_block(tip, std::move(txs), std::max(ts, tip ? tip->timestamp : ts));
    auto applied = ledger::apply_block(state_, block, rules);
    block.validation_codes = applied.codes;
    for (std::size_t i = 0; i < receipt_ids.size(); ++i) {
        auto& r = receipts_[receipt_ids[i]];
        r.status = TxStatus::Committed;
        r.tx_id = block.transactions[i].tx_id.hex();
        r.height = block.height();
        r.code = block.validation_codes[i];
    }
    commit_locked(block, std::move(applied.state));
    return block;
}

void PublicChain::advance(TimestampMs now) {
    std::vector<Block> committed;
    {
        std::unique_lock lock(mutex_);
        if (now < genesis_time_) return;
        const std::int64_t due = (now - genesis_time_) / options_.gas.slot_ms;
        for (std::int64_t slot = last_slot_ + 1; slot <= due; ++slot) {
            if (mempool_.empty()) break;
            if (auto b = propose_locked(slot)) committed.push_back(std::move(*b));
        }
        last_slot_ = std::max(last_slot_, due);
    }
    notify(committed);
}

std::size_t PublicChain::pending_count() const {
    std::shared_lock lock(mutex_);
    return mempool_.size();
}

Value PublicChain::query(const Invocation& invocation) const {
    std::shared_lock lock(mutex_);
    contracts::ExecEnv env{clock_->now_ms(), state_.height() + 1, true};
    return contracts::execute(*registry_, state_, invocation, env).result;
}

Account PublicChain::account(std::string_view address) const {
    std::shared_lock lock(mutex_);
    Account a;
    a.address = std::string(address);
    a.eth_balance = balance(state_, contracts::eth_key(address));
    a.link_balance = balance(state_, contracts::link_key(address));
    a.staked = std::find(stakers_.begin(), stakers_.end(), address) != stakers_.end();
    return a;
}

std::vector<Account> PublicChain::accounts() const {
    std::vector<std::string> names;
    {
        std::shared_lock lock(mutex_);
        for (const auto& [key, entry] : state_.entries()) {
            if (key.starts_with("eth/")) names.push_back(key.substr(4));
        }
    }
    std::vector<Account> out;
    for (const auto& n : names) out.push_back(account(n));
    return out;
}

Amount PublicChain::fees_collected() const {
    std::shared_lock lock(mutex_);
    return balance(state_, validation_rules().fee_sink_key);
}

} // namespace twin::consensus
