#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twin/ledger/amount.hpp"
#include "twin/ledger/digest.hpp"
#include "twin/ledger/types.hpp"

namespace twin::ledger {

struct ReadEntry {
    std::string key;
    std::uint64_t version = 0;  // 0 = key absent when read

    bool operator==(const ReadEntry&) const = default;
};

struct WriteEntry {
    std::string key;
    Value value;  // string or integer

    bool operator==(const WriteEntry&) const = default;
};

struct EventRecord {
    std::string name;
    Value payload;

    bool operator==(const EventRecord&) const = default;
};

/// A state transition as recorded on chain.
///
/// `tx_id` covers the body (contract, method, args, submitter, nonce, read and
/// write sets). Endorsements, the fee and emitted events sit outside the id but
/// inside the transaction's Merkle leaf, so every stored byte is hash-covered.
struct Transaction {
    Digest tx_id;
    std::string contract;
    std::string method;
    Value args = Value::array();
    std::string submitter;
    std::uint64_t nonce = 0;
    std::vector<ReadEntry> read_set;
    std::vector<WriteEntry> write_set;
    std::vector<std::string> endorsements;
    Amount fee_paid;
    std::vector<EventRecord> events;

    Value body() const;
    Digest compute_id() const;
    /// Merkle leaf: digest of the full canonical envelope, including tx_id.
    Digest leaf() const;

    /// Sorts the write set, rejects duplicate keys and sets tx_id.
    void seal();

    Value to_json() const;
    static Transaction from_json(const Value& json);

    bool operator==(const Transaction&) const = default;
};

Value encode_read_set(const std::vector<ReadEntry>& reads);
Value encode_write_set(const std::vector<WriteEntry>& writes);

} // namespace twin::ledger
