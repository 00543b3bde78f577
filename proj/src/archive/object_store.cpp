#include "twin/archive/object_store.hpp"

#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "twin/ledger/canonical.hpp"

namespace twin::archive {

namespace fs = std::filesystem;

namespace {

void write_atomically(const fs::path& target, std::string_view bytes) {
    static std::atomic<std::uint64_t> counter{0};
    std::ostringstream tmp_name;
    tmp_name << target.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id())
             << "." << counter++;
    const fs::path tmp = target.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw ArchiveError(ArchiveError::Kind::StorageFull, "cannot write " + target.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ArchiveError(ArchiveError::Kind::StorageFull, "cannot store " + target.string() + ": " + ec.message());
    }
}

} // namespace

ContentId ContentId::parse(std::string_view text) {
    constexpr std::string_view prefix = "sha256:";
    if (!text.starts_with(prefix)) throw ArchiveError(ArchiveError::Kind::InvalidId, "bad content id");
    try {
        return ContentId(ledger::Digest::from_hex(text.substr(prefix.size())));
    } catch (const std::exception&) {
        throw ArchiveError(ArchiveError::Kind::InvalidId, "bad content id");
    }
}

ObjectStore::ObjectStore(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_);
}

fs::path ObjectStore::path_of(const ContentId& cid) const {
    const std::string hex = cid.digest().hex();
    return root_ / hex.substr(0, 2) / hex;
}

ContentId ObjectStore::put(std::string_view bytes) {
    const ContentId cid = ContentId::of(bytes);
    const fs::path path = path_of(cid);
    if (fs::exists(path)) return cid;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw ArchiveError(ArchiveError::Kind::StorageFull, ec.message());
    write_atomically(path, bytes);
    return cid;
}

std::string ObjectStore::get(const ContentId& cid) const {
    std::ifstream in(path_of(cid), std::ios::binary);
    if (!in) throw ArchiveError(ArchiveError::Kind::NotFound, cid.to_string() + " not found");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (ledger::digest(bytes) != cid.digest()) {
        throw ArchiveError(ArchiveError::Kind::IntegrityFailure, cid.to_string() + " failed its integrity check");
    }
    return bytes;
}

bool ObjectStore::contains(const ContentId& cid) const {
    return fs::exists(path_of(cid));
}

Value SnapshotRecord::to_json() const {
    Value out{{"from_ts", from_ts}, {"kind", kind}, {"payload", payload}, {"to_ts", to_ts}};
    out["prev_snapshot"] = prev_snapshot ? Value(prev_snapshot->to_string()) : Value(nullptr);
    return out;
}

SnapshotRecord SnapshotRecord::from_json(const Value& json) {
    SnapshotRecord r;
    r.kind = json.at("kind").get<std::string>();
    r.from_ts = json.at("from_ts").get<TimestampMs>();
    r.to_ts = json.at("to_ts").get<TimestampMs>();
    r.payload = json.at("payload").get<std::string>();
    const auto& prev = json.at("prev_snapshot");
    if (!prev.is_null()) r.prev_snapshot = ContentId::parse(prev.get<std::string>());
    return r;
}

SnapshotArchive::SnapshotArchive(fs::path root) : store_(root), head_path_(root / "HEAD") {}

std::optional<ContentId> SnapshotArchive::head() const {
    std::lock_guard lock(mutex_);
    std::ifstream in(head_path_);
    std::string text;
    if (!in || !std::getline(in, text) || text.empty()) return std::nullopt;
    return ContentId::parse(text);
}

ContentId SnapshotArchive::append_locked(SnapshotRecord record) {
    std::ifstream in(head_path_);
    std::string text;
    if (in && std::getline(in, text) && !text.empty()) record.prev_snapshot = ContentId::parse(text);
    const ContentId cid = store_.put(ledger::canonical_encode(record.to_json()));
    write_atomically(head_path_, cid.to_string() + "\n");
    return cid;
}

ContentId SnapshotArchive::snapshot(const std::vector<contracts::BuildingData>& history,
                                    const ledger::WorldState& state, TimestampMs now) {
    std::lock_guard lock(mutex_);
    const ContentId state_cid = store_.put(state.canonical());
    Value readings = Value::array();
    for (const auto& d : history) readings.push_back(d.to_json());
    SnapshotRecord r;
    r.kind = "sensor-history";
    r.from_ts = history.empty() ? now : history.front().as_of;
    r.to_ts = now;
    r.payload = ledger::canonical_encode(Value{{"readings", std::move(readings)},
                                               {"world_state", state_cid.to_string()},
                                               {"world_state_height", state.height()}});
    return append_locked(std::move(r));
}

ContentId SnapshotArchive::snapshot_world_state(const ledger::WorldState& state, TimestampMs now) {
    std::lock_guard lock(mutex_);
    SnapshotRecord r;
    r.kind = "world-state";
    r.from_ts = now;
    r.to_ts = now;
    r.payload = state.canonical();
    return append_locked(std::move(r));
}

SnapshotRecord SnapshotArchive::record(const ContentId& cid) const {
    const std::string bytes = store_.get(cid);
    return SnapshotRecord::from_json(ledger::canonical_decode(bytes));
}

std::vector<std::pair<ContentId, SnapshotRecord>> SnapshotArchive::log() const {
    std::vector<std::pair<ContentId, SnapshotRecord>> out;
    std::set<ContentId> seen;
    auto cursor = head();
    while (cursor) {
        if (!seen.insert(*cursor).second) {
            throw ArchiveError(ArchiveError::Kind::IntegrityFailure, "snapshot chain loops at " + cursor->to_string());
        }
        auto r = record(*cursor);
        auto next = r.prev_snapshot;
        out.emplace_back(*cursor, std::move(r));
        cursor = next;
    }
    return out;
}

} // namespace twin::archive
