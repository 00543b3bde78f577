#include "twin/ledger/canonical.hpp"

namespace twin::ledger {

const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NonCanonicalValue: return "NonCanonicalValue";
        case Errc::EmptyLeaves: return "EmptyLeaves";
        case Errc::EmptyBatch: return "EmptyBatch";
        case Errc::NonMonotoneTimestamp: return "NonMonotoneTimestamp";
        case Errc::HeightGap: return "HeightGap";
        case Errc::Malformed: return "Malformed";
        case Errc::DuplicateWriteKey: return "DuplicateWriteKey";
        case Errc::Storage: return "Storage";
    }
    return "Unknown";
}

void ensure_canonical(const Value& value) {
    using T = Value::value_t;
    switch (value.type()) {
        case T::null:
        case T::boolean:
        case T::string:
        case T::number_integer:
        case T::number_unsigned:
            return;
        case T::number_float:
            throw LedgerError(Errc::NonCanonicalValue, "floating-point number in consensus data");
        case T::array:
            for (const auto& item : value) ensure_canonical(item);
            return;
        case T::object:
            for (const auto& [key, item] : value.items()) ensure_canonical(item);
            return;
        case T::binary:
        case T::discarded:
            break;
    }
    throw LedgerError(Errc::NonCanonicalValue, "unsupported value type in consensus data");
}

std::string canonical_encode(const Value& value) {
    ensure_canonical(value);
    try {
        // nlohmann's object type is a std::map, so keys come out sorted bytewise.
        return value.dump(-1, ' ', false, Value::error_handler_t::strict);
    } catch (const nlohmann::json::type_error& e) {
        throw LedgerError(Errc::NonCanonicalValue, e.what());
    }
}

Value canonical_decode(std::string_view bytes) {
    Value value;
    try {
        value = Value::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw LedgerError(Errc::Malformed, e.what());
    }
    if (canonical_encode(value) != bytes) {
        throw LedgerError(Errc::NonCanonicalValue, "bytes are not in canonical form");
    }
    return value;
}

} // namespace twin::ledger
