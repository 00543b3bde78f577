#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>

#include "twin/consensus/backend.hpp"
#include "twin/consensus/topology.hpp"

namespace twin::consensus {

/// A peer's simulated execution result for one proposal.
struct Endorsement {
    std::string peer;
    std::vector<ledger::ReadEntry> read_set;
    std::vector<ledger::WriteEntry> write_set;
    std::vector<ledger::EventRecord> events;
    Value result;
};

/// Injected peer misbehaviour for tests.
struct PeerFault {
    bool unreachable = false;
    bool divergent_writes = false;
};

struct PendingTx {
    ledger::Transaction tx;
    TimestampMs arrival = 0;
};

/// Cuts at most one block from the front of `pending` when it holds at least
/// `max_block_txs` transactions or its oldest entry is `batch_timeout_ms` old.
/// Transactions keep arrival order.
std::optional<ledger::Block> order_batch(std::deque<PendingTx>& pending, const OrderingParams& params, TimestampMs now,
                                         const std::optional<ledger::BlockHeader>& tip);

/// Permissioned pipeline: endorse -> order -> validate -> commit.
class FabricNetwork final : public LedgerBackend {
public:
    struct Options {
        NetworkTopology topology = default_topology();
        OrderingParams ordering;
        std::optional<std::filesystem::path> store_dir;
    };

    FabricNetwork(Options options, std::shared_ptr<const contracts::ContractRegistry> registry,
                  std::shared_ptr<Clock> clock);

    /// Installs chaincode on every peer (or one peer).
    void install(std::string_view contract);
    void install(std::string_view contract, std::string_view peer);

    /// Simulates `proposal` on `peer`'s committed state without committing.
    Endorsement endorse(const Invocation& proposal, std::string_view peer) const;

    /// Endorses on one reachable peer per policy org, requires identical write
    /// sets, then enqueues the transaction at the orderer.
    ledger::Transaction collect_and_submit(const Invocation& proposal);
    ledger::Transaction collect_and_submit(const Invocation& proposal, const EndorsementPolicy& policy);

    void set_fault(std::string_view peer, PeerFault fault);

    const NetworkTopology& topology() const noexcept { return options_.topology; }
    const OrderingParams& ordering() const noexcept { return options_.ordering; }
    ledger::ValidationRules validation_rules() const;
    ledger::WorldState peer_state(std::string_view peer) const;

    BackendKind kind() const override { return BackendKind::Permissioned; }
    SubmitReceipt submit(const Invocation& invocation) override;
    Value query(const Invocation& invocation) const override;
    void advance(TimestampMs now) override;
    std::size_t pending_count() const override;

private:
    struct Peer {
        PeerInfo info;
        std::set<std::string, std::less<>> installed;
        ledger::WorldState state;
        PeerFault fault;
    };

    const Peer& require_peer(std::string_view name) const;
    Peer& require_peer(std::string_view name);
    Endorsement endorse_locked(const Invocation& proposal, const Peer& peer) const;

    Options options_;
    std::vector<Peer> peers_;
    std::deque<PendingTx> pending_;
    std::map<std::string, std::uint64_t, std::less<>> nonces_;
};

} // namespace twin::consensus
