#include "twin/ledger/block.hpp"

#include <vector>

#include "json_access.hpp"
#include "twin/ledger/canonical.hpp"
#include "twin/ledger/merkle.hpp"

namespace twin::ledger {

const char* to_string(ValidationCode code) noexcept {
    switch (code) {
        case ValidationCode::Valid: return "VALID";
        case ValidationCode::MvccReadConflict: return "MVCC_READ_CONFLICT";
        case ValidationCode::EndorsementPolicyFailure: return "ENDORSEMENT_POLICY_FAILURE";
        case ValidationCode::OutOfFunds: return "OUT_OF_FUNDS";
    }
    return "UNKNOWN";
}

ValidationCode parse_validation_code(std::string_view name) {
    for (auto c : {ValidationCode::Valid, ValidationCode::MvccReadConflict, ValidationCode::EndorsementPolicyFailure,
                   ValidationCode::OutOfFunds}) {
        if (name == to_string(c)) return c;
    }
    throw LedgerError(Errc::Malformed, "unknown validation code " + std::string(name));
}

const char* to_string(ChainFault fault) noexcept {
    switch (fault) {
        case ChainFault::None: return "ok";
        case ChainFault::LinkMismatch: return "link-mismatch";
        case ChainFault::MerkleMismatch: return "merkle-mismatch";
        case ChainFault::HeightMismatch: return "height-mismatch";
        case ChainFault::TimestampRegression: return "timestamp-regression";
        case ChainFault::MalformedBlock: return "malformed-block";
        case ChainFault::HeaderHashMismatch: return "header-hash-mismatch";
        case ChainFault::DecodeFailure: return "decode-failure";
        case ChainFault::ManifestMismatch: return "manifest-mismatch";
        case ChainFault::MissingBlock: return "missing-block";
    }
    return "unknown";
}

Value BlockHeader::to_json() const {
    return Value{
        {"height", height},
        {"merkle_root", merkle_root.hex()},
        {"nonce", nonce},
        {"prev_hash", prev_hash.hex()},
        {"timestamp", timestamp},
        {"version", version},
    };
}

BlockHeader BlockHeader::from_json(const Value& json) {
    detail::require_keys(json, {"height", "merkle_root", "nonce", "prev_hash", "timestamp", "version"}, "header");
    BlockHeader h;
    h.height = detail::get_int(json, "height");
    h.merkle_root = Digest::from_hex(detail::get_string(json, "merkle_root"));
    h.nonce = detail::get_int(json, "nonce");
    h.prev_hash = Digest::from_hex(detail::get_string(json, "prev_hash"));
    h.timestamp = detail::get_int(json, "timestamp");
    h.version = detail::get_int(json, "version");
    return h;
}

Digest BlockHeader::hash() const {
    return digest(canonical_encode(to_json()));
}

Value Block::to_json() const {
    Value txs = Value::array();
    for (const auto& tx : transactions) txs.push_back(tx.to_json());
    Value codes = Value::array();
    for (auto c : validation_codes) codes.push_back(to_string(c));
    return Value{{"header", header.to_json()}, {"transactions", std::move(txs)}, {"validation_codes", std::move(codes)}};
}

Block Block::from_json(const Value& json) {
    detail::require_keys(json, {"header", "transactions", "validation_codes"}, "block");
    Block b;
    b.header = BlockHeader::from_json(json.at("header"));
    for (const auto& tx : detail::get_array(json, "transactions")) b.transactions.push_back(Transaction::from_json(tx));
    for (const auto& c : detail::get_array(json, "validation_codes")) {
        if (!c.is_string()) throw LedgerError(Errc::Malformed, "validation code must be a string");
        b.validation_codes.push_back(parse_validation_code(c.get_ref<const std::string&>()));
    }
    return b;
}

Digest genesis_prev_hash() {
    return digest(std::string_view{});
}

Digest compute_merkle_root(std::span<const Transaction> txs) {
    std::vector<Digest> leaves;
    leaves.reserve(txs.size());
    for (const auto& tx : txs) leaves.push_back(tx.leaf());
    return merkle_root(leaves);
}

Block build_block(const std::optional<BlockHeader>& prev, std::vector<Transaction> txs, TimestampMs timestamp) {
    if (txs.empty()) throw LedgerError(Errc::EmptyBatch, "cannot build a block without transactions");
    if (prev && timestamp < prev->timestamp) {
        throw LedgerError(Errc::NonMonotoneTimestamp, "block timestamp earlier than its predecessor");
    }
    Block b;
    b.header.height = prev ? prev->height + 1 : 0;
    b.header.prev_hash = prev ? prev->hash() : genesis_prev_hash();
    b.header.timestamp = timestamp;
    b.header.merkle_root = compute_merkle_root(txs);
    b.validation_codes.assign(txs.size(), ValidationCode::Valid);
    b.transactions = std::move(txs);
    return b;
}

VerificationReport verify_chain(std::span<const Block> blocks) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& b = blocks[i];
        const BlockHeader& h = b.header;
        const BlockHeader* prev = i > 0 ? &blocks[i - 1].header : nullptr;

        if (prev) {
            if (h.prev_hash != prev->hash()) {
                return VerificationReport::failure(h.height, ChainFault::LinkMismatch, "prev_hash does not match predecessor");
            }
        } else if (h.height == 0 && h.prev_hash != genesis_prev_hash()) {
            return VerificationReport::failure(0, ChainFault::LinkMismatch, "genesis prev_hash is not digest(empty)");
        }

        if (b.transactions.empty() || b.validation_codes.size() != b.transactions.size()) {
            return VerificationReport::failure(h.height, ChainFault::MalformedBlock, "transaction/code count mismatch");
        }
        for (const auto& tx : b.transactions) {
            if (tx.compute_id() != tx.tx_id) {
                return VerificationReport::failure(h.height, ChainFault::MerkleMismatch, "tx_id does not match body");
            }
        }
        if (compute_merkle_root(b.transactions) != h.merkle_root) {
            return VerificationReport::failure(h.height, ChainFault::MerkleMismatch, "merkle root mismatch");
        }

        bool height_ok = prev ? h.height == prev->height + 1 : h.height >= 0;
        if (!height_ok) {
            return VerificationReport::failure(h.height, ChainFault::HeightMismatch, "height is not predecessor + 1");
        }
        if (prev && h.timestamp < prev->timestamp) {
            return VerificationReport::failure(h.height, ChainFault::TimestampRegression, "timestamp went backwards");
        }
        if (h.version != kBlockVersion || h.nonce != 0) {
            return VerificationReport::failure(h.height, ChainFault::MalformedBlock, "unsupported version or nonzero nonce");
        }
    }
    return {};
}

} // namespace twin::ledger
