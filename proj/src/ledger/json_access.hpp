#pragma once

// Strict accessors for decoding ledger records. Every failure is a
// LedgerError(Malformed) so a damaged file never half-decodes.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "twin/ledger/types.hpp"

namespace twin::ledger::detail {

inline void require_keys(const Value& obj, std::initializer_list<std::string_view> keys, std::string_view what) {
    if (!obj.is_object() || obj.size() != keys.size()) {
        throw LedgerError(Errc::Malformed, std::string(what) + ": unexpected field set");
    }
    for (auto key : keys) {
        if (!obj.contains(key)) throw LedgerError(Errc::Malformed, std::string(what) + ": missing " + std::string(key));
    }
}

inline const Value& field(const Value& obj, std::string_view key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw LedgerError(Errc::Malformed, "missing field " + std::string(key));
    return *it;
}

inline std::string get_string(const Value& obj, std::string_view key) {
    const auto& v = field(obj, key);
    if (!v.is_string()) throw LedgerError(Errc::Malformed, std::string(key) + " must be a string");
    return v.get<std::string>();
}

inline std::int64_t get_int(const Value& obj, std::string_view key) {
    const auto& v = field(obj, key);
    if (!v.is_number_integer()) throw LedgerError(Errc::Malformed, std::string(key) + " must be an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        throw LedgerError(Errc::Malformed, std::string(key) + " out of range");
    }
    return v.get<std::int64_t>();
}

inline std::uint64_t get_uint(const Value& v, std::string_view what) {
    if (!v.is_number_unsigned()) throw LedgerError(Errc::Malformed, std::string(what) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline const Value& get_array(const Value& obj, std::string_view key) {
    const auto& v = field(obj, key);
    if (!v.is_array()) throw LedgerError(Errc::Malformed, std::string(key) + " must be an array");
    return v;
}

inline bool is_scalar(const Value& v) {
    return v.is_string() || v.is_number_integer();
}

} // namespace twin::ledger::detail
