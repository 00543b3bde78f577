#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twin/consensus/clock.hpp"
#include "twin/contracts/runtime.hpp"
#include "twin/ledger/block_store.hpp"
#include "twin/ledger/world_state.hpp"

namespace twin::consensus {

using contracts::Invocation;

enum class BackendKind { Permissioned, Public };

const char* to_string(BackendKind kind) noexcept;

class BackendError : public std::runtime_error {
public:
    enum class Kind {
        UnknownPeer,
        EndorsementMismatch,
        PolicyUnsatisfied,
        NoStakers,
        UnknownAccount,
        BackendUnavailable,
    };

    BackendError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

enum class TxStatus { Pending, Committed, Failed };

const char* to_string(TxStatus status) noexcept;

struct SubmitReceipt {
    std::string id;
    TxStatus status = TxStatus::Pending;
    std::string tx_id;  // set once committed (equal to id in permissioned mode)
    std::optional<std::int64_t> height;
    std::optional<ledger::ValidationCode> code;
    std::string error;

    Value to_json() const;
};

/// An event emitted by a Valid transaction, positioned in the chain.
struct ContractEvent {
    std::string name;
    Value payload;
    std::int64_t block_height = 0;
    std::string tx_id;

    Value to_json() const;
    bool operator==(const ContractEvent&) const = default;
};

/// Events of every Valid transaction in `block`, in order.
std::vector<ContractEvent> events_of(const ledger::Block& block);

/// The submission and read surface shared by both consensus backends.
///
/// Submission is safe from any thread. `advance` drives block production and
/// must be called by a single driver. Reads see committed state only.
class LedgerBackend {
public:
    using CommitListener = std::function<void(const ledger::Block&, const std::vector<ContractEvent>&)>;

    virtual ~LedgerBackend() = default;

    virtual BackendKind kind() const = 0;
    /// Throws ContractError when simulation rejects the call and BackendError
    /// for pipeline failures.
    virtual SubmitReceipt submit(const Invocation& invocation) = 0;
    /// Evaluates against committed state without ordering anything.
    virtual Value query(const Invocation& invocation) const = 0;
    /// Produces every block that is due at `now`.
    virtual void advance(TimestampMs now) = 0;
    virtual std::size_t pending_count() const = 0;

    std::int64_t height() const;
    std::optional<ledger::Block> block(std::int64_t height) const;
    std::vector<ledger::Block> blocks() const;
    std::optional<SubmitReceipt> receipt(std::string_view id) const;
    /// Block and index of a committed transaction.
    std::optional<std::pair<std::int64_t, std::size_t>> locate(std::string_view tx_id) const;
    ledger::WorldState state() const;
    std::size_t committed_tx_count() const;

    void on_commit(CommitListener listener);
    const std::shared_ptr<Clock>& clock() const noexcept { return clock_; }
    const contracts::ContractRegistry& registry() const noexcept { return *registry_; }

protected:
    LedgerBackend(std::shared_ptr<const contracts::ContractRegistry> registry, std::shared_ptr<Clock> clock,
                  std::optional<std::filesystem::path> store_dir);

    /// Appends a block whose validation codes are final. Caller holds mutex_.
    /// `persist` is false when re-adopting blocks loaded from the store.
    void commit_locked(ledger::Block block, ledger::WorldState new_state, bool persist = true);
    /// Runs commit listeners. Caller must not hold mutex_.
    void notify(const std::vector<ledger::Block>& committed);

    /// Loads a persisted chain, if any, verifying it. Returns the blocks.
    std::vector<ledger::Block> load_persisted() const;

    mutable std::shared_mutex mutex_;
    std::shared_ptr<const contracts::ContractRegistry> registry_;
    std::shared_ptr<Clock> clock_;
    std::optional<ledger::BlockStore> store_;
    std::vector<ledger::Block> chain_;
    ledger::WorldState state_;
    std::map<std::string, std::pair<std::int64_t, std::size_t>, std::less<>> tx_index_;
    std::map<std::string, SubmitReceipt, std::less<>> receipts_;

private:
    std::mutex listeners_mutex_;
    std::vector<CommitListener> listeners_;
};

} // namespace twin::consensus
