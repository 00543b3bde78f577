#include "twin/ledger/block_store.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json_access.hpp"
#include "twin/ledger/canonical.hpp"

namespace fs = std::filesystem;

namespace twin::ledger {

namespace {

void write_file_atomic(const fs::path& target, const std::string& bytes) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw LedgerError(Errc::Storage, "cannot open " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw LedgerError(Errc::Storage, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw LedgerError(Errc::Storage, "rename failed: " + ec.message());
}

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string encode_block_file(const Block& block) {
    Value json = block.to_json();
    json["hash"] = block.header.hash().hex();
    return canonical_encode(json);
}

BlockFile decode_block_file(std::string_view bytes) {
    Value json = canonical_decode(bytes);
    if (!json.is_object() || !json.contains("hash")) throw LedgerError(Errc::Malformed, "block file without hash");
    Digest hash = Digest::from_hex(detail::get_string(json, "hash"));
    json.erase("hash");
    return {Block::from_json(json), hash};
}

BlockStore::BlockStore(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_ / "blocks");
}

fs::path BlockStore::block_path(std::int64_t height) const {
    std::ostringstream name;
    name << std::setw(12) << std::setfill('0') << height << ".json";
    return root_ / "blocks" / name.str();
}

fs::path BlockStore::manifest_path() const {
    return root_ / "chain.json";
}

void BlockStore::append(const Block& block) {
    write_file_atomic(block_path(block.height()), encode_block_file(block));
    Value manifest{{"tip_digest", block.header.hash().hex()}, {"tip_height", block.height()}};
    write_file_atomic(manifest_path(), canonical_encode(manifest));
}

std::int64_t BlockStore::tip_height() const {
    auto bytes = read_file(manifest_path());
    if (!bytes) return -1;
    try {
        return detail::get_int(Value::parse(*bytes), "tip_height");
    } catch (const std::exception&) {
        return -1;
    }
}

std::optional<Block> BlockStore::load(std::int64_t height) const {
    auto bytes = read_file(block_path(height));
    if (!bytes) return std::nullopt;
    return decode_block_file(*bytes).block;
}

BlockStore::LoadResult BlockStore::load_verified() const {
    LoadResult result;
    auto manifest_bytes = read_file(manifest_path());
    if (!manifest_bytes) return result;

    std::int64_t tip = -1;
    Digest tip_digest;
    try {
        Value manifest = canonical_decode(*manifest_bytes);
        detail::require_keys(manifest, {"tip_digest", "tip_height"}, "manifest");
        tip = detail::get_int(manifest, "tip_height");
        tip_digest = Digest::from_hex(detail::get_string(manifest, "tip_digest"));
    } catch (const LedgerError& e) {
        result.report = VerificationReport::failure(0, ChainFault::ManifestMismatch, e.what());
        return result;
    }

    for (std::int64_t h = 0; h <= tip; ++h) {
        auto bytes = read_file(block_path(h));
        if (!bytes) {
            result.report = VerificationReport::failure(h, ChainFault::MissingBlock, block_path(h).string());
            return result;
        }
        BlockFile file;
        try {
            file = decode_block_file(*bytes);
        } catch (const LedgerError& e) {
            result.report = VerificationReport::failure(h, ChainFault::DecodeFailure, e.what());
            return result;
        }
        if (file.block.height() != h) {
            result.report = VerificationReport::failure(h, ChainFault::HeightMismatch, "file name and header height differ");
            return result;
        }
        if (file.block.header.hash() != file.hash) {
            result.report = VerificationReport::failure(h, ChainFault::HeaderHashMismatch, "stored header hash mismatch");
            return result;
        }
        result.blocks.push_back(std::move(file.block));
    }

    result.report = verify_chain(result.blocks);
    if (result.report.ok && !result.blocks.empty() && result.blocks.back().header.hash() != tip_digest) {
        result.report = VerificationReport::failure(tip, ChainFault::ManifestMismatch, "tip digest mismatch");
    }
    return result;
}

} // namespace twin::ledger
