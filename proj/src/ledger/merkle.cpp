#include "twin/ledger/merkle.hpp"

#include <vector>

#include "twin/ledger/types.hpp"

namespace twin::ledger {

Digest merkle_root(std::span<const Digest> leaves) {
    if (leaves.empty()) {
        throw LedgerError(Errc::EmptyLeaves, "merkle_root of empty leaf list");
    }
    std::vector<Digest> level(leaves.begin(), leaves.end());
    while (level.size() > 1) {
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            const Digest& right = i + 1 < level.size() ? level[i + 1] : level[i];
            next.push_back(digest_pair(level[i], right));
        }
        level = std::move(next);
    }
    return level.front();
}

} // namespace twin::ledger
