#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace twin {

/// Milliseconds since the Unix epoch (or since a virtual epoch in simulation).
using TimestampMs = std::int64_t;

/// Structured data as carried in transactions, world state and events.
using Value = nlohmann::json;

namespace ledger {

enum class Errc {
    NonCanonicalValue,
    EmptyLeaves,
    EmptyBatch,
    NonMonotoneTimestamp,
    HeightGap,
    Malformed,
    DuplicateWriteKey,
    Storage,
};

const char* to_string(Errc code) noexcept;

class LedgerError : public std::runtime_error {
public:
    LedgerError(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace ledger
} // namespace twin
