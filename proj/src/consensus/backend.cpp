#include "twin/consensus/backend.hpp"

namespace twin::consensus {

const char* to_string(BackendKind kind) noexcept {
    return kind == BackendKind::Permissioned ? "permissioned" : "public";
}

const char* to_string(TxStatus status) noexcept {
    switch (status) {
        case TxStatus::Pending: return "pending";
        case TxStatus::Committed: return "committed";
        case TxStatus::Failed: return "failed";
    }
    return "unknown";
}

Value SubmitReceipt::to_json() const {
    Value out{{"id", id}, {"status", to_string(status)}};
    if (!tx_id.empty()) out["tx_id"] = tx_id;
    if (height) out["block_height"] = *height;
    if (code) out["validation_code"] = ledger::to_string(*code);
    if (!error.empty()) out["error"] = error;
    return out;
}

Value ContractEvent::to_json() const {
    return Value{{"block_height", block_height}, {"name", name}, {"payload", payload}, {"tx_id", tx_id}};
}

std::vector<ContractEvent> events_of(const ledger::Block& block) {
    std::vector<ContractEvent> out;
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        if (i < block.validation_codes.size() && block.validation_codes[i] != ledger::ValidationCode::Valid) continue;
        const auto& tx = block.transactions[i];
        for (const auto& e : tx.events) out.push_back({e.name, e.payload, block.height(), tx.tx_id.hex()});
    }
    return out;
}

LedgerBackend::LedgerBackend(std::shared_ptr<const contracts::ContractRegistry> registry, std::shared_ptr<Clock> clock,
                             std::optional<std::filesystem::path> store_dir)
    : registry_(std::move(registry)), clock_(std::move(clock)) {
    if (store_dir) store_.emplace(*store_dir);
}

std::int64_t LedgerBackend::height() const {
    std::shared_lock lock(mutex_);
    return chain_.empty() ? -1 : chain_.back().height();
}

std::optional<ledger::Block> LedgerBackend::block(std::int64_t h) const {
    std::shared_lock lock(mutex_);
    if (h < 0 || h >= static_cast<std::int64_t>(chain_.size())) return std::nullopt;
    return chain_[static_cast<std::size_t>(h)];
}

std::vector<ledger::Block> LedgerBackend::blocks() const {
    std::shared_lock lock(mutex_);
    return chain_;
}

std::optional<SubmitReceipt> LedgerBackend::receipt(std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = receipts_.find(id);
    if (it == receipts_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::pair<std::int64_t, std::size_t>> LedgerBackend::locate(std::string_view tx_id) const {
    std::shared_lock lock(mutex_);
    auto it = tx_index_.find(tx_id);
    if (it == tx_index_.end()) return std::nullopt;
    return it->second;
}

ledger::WorldState LedgerBackend::state() const {
    std::shared_lock lock(mutex_);
    return state_;
}

std::size_t LedgerBackend::committed_tx_count() const {
    std::shared_lock lock(mutex_);
    return tx_index_.size();
}

void LedgerBackend::on_commit(CommitListener listener) {
    std::lock_guard lock(listeners_mutex_);
    listeners_.push_back(std::move(listener));
}

void LedgerBackend::commit_locked(ledger::Block block, ledger::WorldState new_state, bool persist) {
    if (store_ && persist) store_->append(block);
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const std::string id = block.transactions[i].tx_id.hex();
        tx_index_[id] = {block.height(), i};
        if (auto it = receipts_.find(id); it != receipts_.end()) {
            it->second.status = TxStatus::Committed;
            it->second.tx_id = id;
            it->second.height = block.height();
            it->second.code = block.validation_codes[i];
        }
    }
    state_ = std::move(new_state);
    chain_.push_back(std::move(block));
}

void LedgerBackend::notify(const std::vector<ledger::Block>& committed) {
    std::vector<CommitListener> listeners;
    {
        std::lock_guard lock(listeners_mutex_);
        listeners = listeners_;
    }
    for (const auto& b : committed) {
        auto events = events_of(b);
        for (const auto& l : listeners) l(b, events);
    }
}

std::vector<ledger::Block> LedgerBackend::load_persisted() const {
    if (!store_ || store_->tip_height() < 0) return {};
    auto loaded = store_->load_verified();
    if (!loaded.report.ok) {
        throw ledger::LedgerError(ledger::Errc::Storage,
                                  "persisted chain failed verification at height " +
                                      std::to_string(loaded.report.first_invalid_height) + ": " +
                                      ledger::to_string(loaded.report.reason));
    }
    return std::move(loaded.blocks);
}

} // namespace twin::consensus
