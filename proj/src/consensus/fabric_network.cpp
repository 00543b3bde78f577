#include "twin/consensus/fabric_network.hpp"

#include <algorithm>
#include <utility>

#include "twin/ledger/canonical.hpp"

namespace twin::consensus {

using ledger::Block;
using ledger::Transaction;

std::optional<Block> order_batch(std::deque<PendingTx>& pending, const OrderingParams& params, TimestampMs now,
                                 const std::optional<ledger::BlockHeader>& tip) {
    if (pending.empty()) return std::nullopt;
    const bool full = pending.size() >= params.max_block_txs;
    const bool timed_out = now - pending.front().arrival >= params.batch_timeout_ms;
    if (!full && !timed_out) return std::nullopt;
    const std::size_t n = std::min(pending.size(), params.max_block_txs);
    std::vector<Transaction> txs;
    txs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        txs.push_back(std::move(pending.front().tx));
        pending.pop_front();
    }
    const TimestampMs ts = tip ? std::max(now, tip->timestamp) : now;
    return ledger::build_block(tip, std::move(txs), ts);
}

namespace {

Transaction genesis_transaction(const NetworkTopology& topology) {
    Transaction tx;
    tx.contract = "_system";
    tx.method = "genesis";
    tx.submitter = topology.orderer;
    tx.write_set.push_back({"channel/" + topology.channel, ledger::canonical_encode(topology.to_json())});
    tx.seal();
    return tx;
}

void diverge(std::vector<ledger::WriteEntry>& writes) {
    if (writes.empty()) {
        writes.push_back({"_divergent", 1});
        return;
    }
    for (auto& w : writes) {
        if (w.value.is_string()) {
            w.value = w.value.get<std::string>() + "~";
        } else {
            w.value = w.value.get<std::int64_t>() + 1;
        }
    }
}

} // namespace

FabricNetwork::FabricNetwork(Options options, std::shared_ptr<const contracts::ContractRegistry> registry,
                             std::shared_ptr<Clock> clock)
    : LedgerBackend(std::move(registry), std::move(clock), options.store_dir), options_(std::move(options)) {
    for (const auto& info : options_.topology.peers) peers_.push_back(Peer{info, {}, {}, {}});

    auto persisted = load_persisted();
    const auto rules = validation_rules();
    if (persisted.empty()) {
        auto genesis = ledger::build_block(std::nullopt, {genesis_transaction(options_.topology)}, clock_->now_ms());
        auto applied = ledger::apply_block(state_, genesis, rules);
        genesis.validation_codes = applied.codes;
        commit_locked(std::move(genesis), std::move(applied.state));
    } else {
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
    }
    for (auto& p : peers_) p.state = state_;
}

void FabricNetwork::install(std::string_view contract) {
    std::unique_lock lock(mutex_);
    for (auto& p : peers_) p.installed.emplace(contract);
}

void FabricNetwork::install(std::string_view contract, std::string_view peer) {
    std::unique_lock lock(mutex_);
    require_peer(peer).installed.emplace(contract);
}

void FabricNetwork::set_fault(std::string_view peer, PeerFault fault) {
    std::unique_lock lock(mutex_);
    require_peer(peer).fault = fault;
}

const FabricNetwork::Peer& FabricNetwork::require_peer(std::string_view name) const {
    for (const auto& p : peers_) {
        if (p.info.name == name) return p;
    }
    throw BackendError(BackendError::Kind::UnknownPeer, "unknown peer " + std::string(name));
}

FabricNetwork::Peer& FabricNetwork::require_peer(std::string_view name) {
    return const_cast<Peer&>(std::as_const(*this).require_peer(name));
}

ledger::ValidationRules FabricNetwork::validation_rules() const {
    ledger::ValidationRules rules;
    rules.required_orgs = options_.topology.endorsement_policy;
    for (const auto& p : options_.topology.peers) rules.peer_orgs[p.name] = p.org;
    return rules;
}

ledger::WorldState FabricNetwork::peer_state(std::string_view peer) const {
    std::shared_lock lock(mutex_);
    return require_peer(peer).state;
}

Endorsement FabricNetwork::endorse(const Invocation& proposal, std::string_view peer) const {
    std::shared_lock lock(mutex_);
    return endorse_locked(proposal, require_peer(peer));
}

Endorsement FabricNetwork::endorse_locked(const Invocation& proposal, const Peer& peer) const {
    if (peer.fault.unreachable) {
        throw BackendError(BackendError::Kind::BackendUnavailable, peer.info.name + " is unreachable");
    }
    if (!peer.installed.contains(proposal.contract)) {
        throw contracts::ContractError(contracts::ContractError::Kind::UnknownContract,
                                       "chaincode " + proposal.contract + " is not installed on " + peer.info.name);
    }
    contracts::ExecEnv env{clock_->now_ms(), peer.state.height() + 1, false};
    auto result = contracts::execute(*registry_, peer.state, proposal, env);
    Endorsement e{peer.info.name, std::move(result.read_set), std::move(result.write_set), std::move(result.events),
                  std::move(result.result)};
    if (peer.fault.divergent_writes) diverge(e.write_set);
    return e;
}

Transaction FabricNetwork::collect_and_submit(const Invocation& proposal) {
    return collect_and_submit(proposal, options_.topology.endorsement_policy);
}

Transaction FabricNetwork::collect_and_submit(const Invocation& proposal, const EndorsementPolicy& policy) {
    std::unique_lock lock(mutex_);
    std::vector<Endorsement> endorsements;
    for (const auto& org : policy) {
        const Peer* chosen = nullptr;
        for (const auto& p : peers_) {
            if (p.info.org == org && !p.fault.unreachable) {
                chosen = &p;
                break;
            }
        }
        if (!chosen) {
            throw BackendError(BackendError::Kind::PolicyUnsatisfied, "no reachable peer for " + org);
        }
        endorsements.push_back(endorse_locked(proposal, *chosen));
    }
    if (endorsements.empty()) throw BackendError(BackendError::Kind::PolicyUnsatisfied, "empty endorsement policy");
    for (std::size_t i = 1; i < endorsements.size(); ++i) {
        if (endorsements[i].write_set != endorsements[0].write_set) {
            throw BackendError(BackendError::Kind::EndorsementMismatch,
                               "write sets of " + endorsements[0].peer + " and " + endorsements[i].peer + " differ");
        }
    }

    Transaction tx;
    tx.contract = proposal.contract;
    tx.method = proposal.method;
    tx.args = proposal.args;
    tx.submitter = proposal.submitter;
    tx.nonce = nonces_[proposal.submitter]++;
    tx.read_set = std::move(endorsements[0].read_set);
    tx.write_set = std::move(endorsements[0].write_set);
    tx.events = std::move(endorsements[0].events);
    for (const auto& e : endorsements) tx.endorsements.push_back(e.peer);
    tx.seal();

    const std::string id = tx.tx_id.hex();
    receipts_[id] = SubmitReceipt{id, TxStatus::Pending, id, std::nullopt, std::nullopt, {}};
    pending_.push_back({tx, clock_->now_ms()});
    return tx;
}

SubmitReceipt FabricNetwork::submit(const Invocation& invocation) {
    const auto tx = collect_and_submit(invocation);
    std::shared_lock lock(mutex_);
    return receipts_.at(tx.tx_id.hex());
}

Value FabricNetwork::query(const Invocation& invocation) const {
    std::shared_lock lock(mutex_);
    contracts::ExecEnv env{clock_->now_ms(), state_.height() + 1, false};
    return contracts::execute(*registry_, state_, invocation, env).result;
}

void FabricNetwork::advance(TimestampMs now) {
    std::vector<Block> committed;
    {
        std::unique_lock lock(mutex_);
        const auto rules = validation_rules();
        while (true) {
            std::optional<ledger::BlockHeader> tip;
            if (!chain_.empty()) tip = chain_.back().header;
            auto block = order_batch(pending_, options_.ordering, now, tip);
            if (!block) break;
            auto applied = ledger::apply_block(state_, *block, rules);
            block->validation_codes = applied.codes;
            for (auto& p : peers_) p.state = applied.state;
            committed.push_back(*block);
            commit_locked(std::move(*block), std::move(applied.state));
        }
    }
    notify(committed);
}

std::size_t FabricNetwork::pending_count() const {
    std::shared_lock lock(mutex_);
    return pending_.size();
}

} // namespace twin::consensus
