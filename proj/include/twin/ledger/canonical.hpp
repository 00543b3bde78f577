#pragma once

#include <string>
#include <string_view>

#include "twin/ledger/types.hpp"

namespace twin::ledger {

// Canonical form: compact UTF-8 JSON, object keys sorted bytewise, integers in
// base 10. Floating-point numbers are rejected so encodings never depend on the
// platform's float formatting.

/// Throws LedgerError(NonCanonicalValue) if `value` holds a float, binary data
/// or an otherwise unsupported node.
void ensure_canonical(const Value& value);

std::string canonical_encode(const Value& value);

/// Parses `bytes` and requires that they are already in canonical form.
Value canonical_decode(std::string_view bytes);

} // namespace twin::ledger
