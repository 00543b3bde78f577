#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "twin/ledger/block.hpp"

namespace twin::ledger {

/// One file per block at <root>/blocks/<zero-padded height>.json holding the
/// canonical block encoding plus the header hash, and a manifest at
/// <root>/chain.json with the tip height and tip digest.
class BlockStore {
public:
    explicit BlockStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path block_path(std::int64_t height) const;
    std::filesystem::path manifest_path() const;

    /// Writes the block file then the manifest (both via rename).
    void append(const Block& block);

    /// Tip height from the manifest, -1 if the store is empty.
    std::int64_t tip_height() const;

    std::optional<Block> load(std::int64_t height) const;

    struct LoadResult {
        std::vector<Block> blocks;
        VerificationReport report;
    };
    /// Loads every block up to the manifest tip, checking each file decodes,
    /// is canonical and carries the right header hash, then runs verify_chain
    /// and checks the manifest against the tip.
    LoadResult load_verified() const;

private:
    std::filesystem::path root_;
};

struct BlockFile {
    Block block;
    Digest hash;  // header hash as written in the file
};

/// Encoded file contents for `block`.
std::string encode_block_file(const Block& block);
/// Throws LedgerError(Malformed/NonCanonicalValue) if the bytes are not a
/// canonical block file. The stored hash is returned unchecked.
BlockFile decode_block_file(std::string_view bytes);

} // namespace twin::ledger
