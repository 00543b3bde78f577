#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "twin/archive/object_store.hpp"

using namespace twin;
using namespace twin::archive;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

ledger::WorldState sample_state(int v) {
    ledger::WorldState s;
    s.put("BuildingData", std::to_string(v));
    s.set_height(v);
    return s;
}

} // namespace

TEST_CASE("content ids") {
    CHECK(ContentId::of("").to_string() == "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    auto cid = ContentId::of("hello");
    CHECK(ContentId::parse(cid.to_string()) == cid);
    for (const char* bad : {"", "sha256:", "md5:e3b0", "sha256:E3B0C44298FC1C149AFBF4C8996FB92427AE41E4649B934CA495991B7852B855"}) {
        CHECK_THROWS_AS(ContentId::parse(bad), ArchiveError);
    }
}

TEST_CASE("put and get") {
    TempDir dir("twin_archive_put");
    ObjectStore store(dir.path);
    auto empty = store.put("");
    CHECK(empty.to_string().ends_with("7852b855"));
    CHECK(store.get(empty).empty());

    auto a = store.put("payload");
    CHECK(store.put("payload") == a);
    CHECK(store.put("paylaod") != a);
    CHECK(store.path_of(a).parent_path().filename() == a.digest().hex().substr(0, 2));
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir.path)) files += e.is_regular_file() ? 1 : 0;
    CHECK(files == 3);

    try {
        store.get(ContentId::of("never stored"));
        FAIL("expected NotFound");
    } catch (const ArchiveError& e) {
        CHECK(e.kind() == ArchiveError::Kind::NotFound);
    }

    {
        std::fstream f(store.path_of(a), std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(2);
        f.put('X');
    }
    try {
        store.get(a);
        FAIL("expected IntegrityFailure");
    } catch (const ArchiveError& e) {
        CHECK(e.kind() == ArchiveError::Kind::IntegrityFailure);
    }
}

TEST_CASE("random payloads round-trip") {
    TempDir dir("twin_archive_random");
    ObjectStore store(dir.path);
    std::mt19937 rng(1234);
    for (int i = 0; i < 300; ++i) {
        std::string bytes(rng() % 2048, '\0');
        for (auto& c : bytes) c = static_cast<char>(rng() & 0xff);
        auto cid = store.put(bytes);
        CHECK(store.get(cid) == bytes);
        CHECK(cid == ContentId::of(bytes));
    }
}

TEST_CASE("snapshot chain") {
    TempDir dir("twin_archive_snap");
    SnapshotArchive archive(dir.path);
    CHECK_FALSE(archive.head());
    CHECK(archive.log().empty());

    std::vector<contracts::BuildingData> history{{2200, 5000, 40000, 30000, 1000}, {2250, 4800, 41000, 12000, 2000}};
    auto first = archive.snapshot(history, sample_state(1), 3000);
    auto r1 = archive.record(first);
    CHECK_FALSE(r1.prev_snapshot);
    CHECK(r1.kind == "sensor-history");
    CHECK(r1.from_ts == 1000);
    CHECK(r1.to_ts == 3000);
    auto payload = Value::parse(r1.payload);
    CHECK(payload["readings"].size() == 2);
    auto state_cid = ContentId::parse(payload["world_state"].get<std::string>());
    CHECK(archive.store().get(state_cid) == sample_state(1).canonical());

    auto second = archive.snapshot(history, sample_state(2), 4000);
    CHECK(archive.record(second).prev_snapshot == first);
    auto third = archive.snapshot_world_state(sample_state(3), 5000);
    CHECK(*archive.head() == third);

    auto log = archive.log();
    REQUIRE(log.size() == 3);
    CHECK(log[0].first == third);
    CHECK(log[1].first == second);
    CHECK(log[2].first == first);

    SnapshotArchive reopened(dir.path);
    CHECK(reopened.head() == archive.head());

    TempDir other("twin_archive_snap2");
    SnapshotArchive twin_archive(other.path);
    CHECK(twin_archive.snapshot(history, sample_state(1), 3000) == first);
}
