#pragma once

#include <span>

#include "twin/ledger/digest.hpp"

namespace twin::ledger {

/// Binary Merkle root. A lone leaf is its own root; an odd node at any level is
/// paired with itself. Throws LedgerError(EmptyLeaves) for an empty span.
Digest merkle_root(std::span<const Digest> leaves);

} // namespace twin::ledger
