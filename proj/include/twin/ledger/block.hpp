#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twin/ledger/digest.hpp"
#include "twin/ledger/transaction.hpp"

namespace twin::ledger {

inline constexpr std::int64_t kBlockVersion = 1;

enum class ValidationCode {
    Valid,
    MvccReadConflict,
    EndorsementPolicyFailure,
    OutOfFunds,
};

const char* to_string(ValidationCode code) noexcept;
/// Throws LedgerError(Malformed) for unknown names.
ValidationCode parse_validation_code(std::string_view name);

struct BlockHeader {
    std::int64_t version = kBlockVersion;
    std::int64_t height = 0;
    Digest prev_hash;
    Digest merkle_root;
    TimestampMs timestamp = 0;
    std::int64_t nonce = 0;

    Value to_json() const;
    static BlockHeader from_json(const Value& json);
    /// Digest of the canonical header encoding; what the next block links to.
    Digest hash() const;

    bool operator==(const BlockHeader&) const = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;
    std::vector<ValidationCode> validation_codes;

    std::int64_t height() const { return header.height; }

    Value to_json() const;
    static Block from_json(const Value& json);

    bool operator==(const Block&) const = default;
};

/// prev_hash used by the genesis block.
Digest genesis_prev_hash();

Digest compute_merkle_root(std::span<const Transaction> txs);

/// Builds the next block on top of `prev`, or a genesis block (height 0) when
/// `prev` is empty. All validation codes start as Valid.
Block build_block(const std::optional<BlockHeader>& prev, std::vector<Transaction> txs,
                  TimestampMs timestamp);

enum class ChainFault {
    None,
    LinkMismatch,
    MerkleMismatch,
    HeightMismatch,
    TimestampRegression,
    MalformedBlock,
    HeaderHashMismatch,
    DecodeFailure,
    ManifestMismatch,
    MissingBlock,
};

const char* to_string(ChainFault fault) noexcept;

struct VerificationReport {
    bool ok = true;
    std::int64_t first_invalid_height = -1;
    ChainFault reason = ChainFault::None;
    std::string detail;

    static VerificationReport failure(std::int64_t height, ChainFault reason, std::string detail = {}) {
        return {false, height, reason, std::move(detail)};
    }
};

/// Checks, per block and in order: prev_hash linkage, Merkle root (including
/// each tx_id against its body), height continuity, timestamp monotonicity.
/// Stops at the first failure.
VerificationReport verify_chain(std::span<const Block> blocks);

} // namespace twin::ledger
