#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twin/contracts/building_data.hpp"
#include "twin/ledger/digest.hpp"
#include "twin/ledger/world_state.hpp"

namespace twin::archive {

class ArchiveError : public std::runtime_error {
public:
    enum class Kind { NotFound, IntegrityFailure, StorageFull, InvalidId };

    ArchiveError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// "sha256:" followed by the 64-hex digest of the content.
class ContentId {
public:
    explicit ContentId(ledger::Digest digest) : digest_(digest) {}

    static ContentId of(std::string_view bytes) { return ContentId(ledger::digest(bytes)); }
    /// Throws ArchiveError(InvalidId).
    static ContentId parse(std::string_view text);

    std::string to_string() const { return "sha256:" + digest_.hex(); }
    const ledger::Digest& digest() const noexcept { return digest_; }

    auto operator<=>(const ContentId&) const = default;

private:
    ledger::Digest digest_;
};

/// Directory-backed content-addressed store: <root>/<first 2 hex>/<hex>.
class ObjectStore {
public:
    explicit ObjectStore(std::filesystem::path root);

    ContentId put(std::string_view bytes);
    /// Re-hashes on read. Throws ArchiveError(NotFound | IntegrityFailure).
    std::string get(const ContentId& cid) const;
    bool contains(const ContentId& cid) const;
    std::filesystem::path path_of(const ContentId& cid) const;
    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path root_;
};

struct SnapshotRecord {
    std::string kind;  // "sensor-history" or "world-state"
    TimestampMs from_ts = 0;
    TimestampMs to_ts = 0;
    std::string payload;  // canonical JSON text
    std::optional<ContentId> prev_snapshot;

    Value to_json() const;
    static SnapshotRecord from_json(const Value& json);
    bool operator==(const SnapshotRecord&) const = default;
};

/// Backward-linked snapshot chain over an ObjectStore; the head id lives in
/// <root>/HEAD.
class SnapshotArchive {
public:
    explicit SnapshotArchive(std::filesystem::path root);

    /// Stores the world state as its own object and a sensor-history record
    /// whose payload holds the scaled readings and the state object's id.
    ContentId snapshot(const std::vector<contracts::BuildingData>& history, const ledger::WorldState& state,
                       TimestampMs now);
    ContentId snapshot_world_state(const ledger::WorldState& state, TimestampMs now);

    std::optional<ContentId> head() const;
    SnapshotRecord record(const ContentId& cid) const;
    /// Head first, following prev_snapshot links.
    std::vector<std::pair<ContentId, SnapshotRecord>> log() const;

    ObjectStore& store() noexcept { return store_; }
    const ObjectStore& store() const noexcept { return store_; }

private:
    ContentId append_locked(SnapshotRecord record);

    ObjectStore store_;
    std::filesystem::path head_path_;
    mutable std::mutex mutex_;
};

} // namespace twin::archive
