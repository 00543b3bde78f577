#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "twin/ledger/amount.hpp"
#include "twin/ledger/block_store.hpp"
#include "twin/ledger/canonical.hpp"
#include "twin/ledger/merkle.hpp"
#include "twin/ledger/world_state.hpp"

using namespace twin;
using namespace twin::ledger;

namespace {

Transaction make_tx(std::string method, Value args, std::vector<ReadEntry> reads, std::vector<WriteEntry> writes,
                    std::uint64_t nonce = 0) {
    Transaction tx;
    tx.contract = "DigitalTwinContract";
    tx.method = std::move(method);
    tx.args = std::move(args);
    tx.submitter = "gateway";
    tx.nonce = nonce;
    tx.read_set = std::move(reads);
    tx.write_set = std::move(writes);
    tx.endorsements = {"peer0.org1.example.com", "peer0.org2.example.com"};
    tx.seal();
    return tx;
}

std::vector<Block> make_chain(int n) {
    std::vector<Block> chain;
    std::optional<BlockHeader> prev;
    for (int h = 0; h < n; ++h) {
        std::vector<Transaction> txs;
        txs.push_back(make_tx("SetBuildingData", Value::array({2200 + h, "5000", 40000, 30000}), {},
                              {{"k" + std::to_string(h), h}}, static_cast<std::uint64_t>(h)));
        chain.push_back(build_block(prev, std::move(txs), 1000 + 10 * h));
        prev = chain.back().header;
    }
    return chain;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("twin_ledger_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("canonical encoding sorts keys and forbids floats") {
    CHECK(canonical_encode(Value{{"b", 1}, {"a", 2}}) == R"({"a":2,"b":1})");
    CHECK(canonical_encode(Value::parse(R"({"x":{"d":0,"c":[true,"s"]}})")) == R"({"x":{"c":[true,"s"],"d":0}})");
    try {
        canonical_encode(Value{{"t", 1.5}});
        FAIL("expected NonCanonicalValue");
    } catch (const LedgerError& e) {
        CHECK(e.code() == Errc::NonCanonicalValue);
    }
    CHECK_THROWS_AS(canonical_decode(R"({"b":1, "a":2})"), LedgerError);
    CHECK(canonical_decode(R"({"a":2,"b":1})") == Value{{"a", 2}, {"b", 1}});
}

TEST_CASE("digest matches independently computed SHA-256") {
    CHECK(digest(std::string_view{}).hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(digest("abc") == digest("abc"));
    CHECK(digest("abc") != digest("abd"));
    auto d = digest("payload");
    CHECK(Digest::from_hex(d.hex()) == d);
    CHECK(d.hex().size() == 64);
    CHECK_THROWS_AS(Digest::from_hex(std::string(63, 'a')), LedgerError);
    CHECK_THROWS_AS(Digest::from_hex(std::string(64, 'A')), LedgerError);
}

TEST_CASE("merkle root duplicates the odd node") {
    const Digest a = digest("a"), b = digest("b"), c = digest("c");
    CHECK(merkle_root(std::vector{a}) == a);
    // Frozen from an independent hashlib computation.
    CHECK(merkle_root(std::vector{a, b}).hex() == "e5a01fee14e0ed5c48714f22180f25ad8365b53f9779f79dc4a3d7e93963f94a");
    CHECK(merkle_root(std::vector{a, b, c}).hex() == "d31a37ef6ac14a2db1470c4316beb5592e6afd4465022339adafda76a18ffabe");
    CHECK(merkle_root(std::vector{a, b}) != merkle_root(std::vector{b, a}));
    CHECK_THROWS_AS(merkle_root(std::vector<Digest>{}), LedgerError);
}

TEST_CASE("transaction id and write-set invariants") {
    auto tx = make_tx("SetBuildingData", Value::array({1, "x"}), {}, {{"z", 1}, {"a", 2}});
    CHECK(tx.write_set.front().key == "a");
    CHECK(tx.tx_id == tx.compute_id());
    CHECK(Transaction::from_json(tx.to_json()) == tx);

    Transaction dup = tx;
    dup.write_set = {{"a", 1}, {"a", 2}};
    CHECK_THROWS_AS(dup.seal(), LedgerError);

    // Endorsements are outside the id but inside the leaf.
    Transaction other = tx;
    other.endorsements.pop_back();
    CHECK(other.compute_id() == tx.tx_id);
    CHECK(other.leaf() != tx.leaf());
}

TEST_CASE("build_block follows header conventions") {
    auto genesis = build_block(std::nullopt, {make_tx("InitLedger", Value::array(), {}, {{"k", 1}})}, 100);
    CHECK(genesis.height() == 0);
    CHECK(genesis.header.prev_hash == digest(std::string_view{}));
    CHECK(genesis.header.nonce == 0);
    CHECK(genesis.validation_codes == std::vector{ValidationCode::Valid});

    BlockHeader four = genesis.header;
    four.height = 4;
    auto five = build_block(four, {make_tx("m", Value::array(), {}, {})}, 100);
    CHECK(five.height() == 5);
    CHECK(five.header.prev_hash == four.hash());

    try {
        build_block(four, {make_tx("m", Value::array(), {}, {})}, 99);
        FAIL("expected NonMonotoneTimestamp");
    } catch (const LedgerError& e) {
        CHECK(e.code() == Errc::NonMonotoneTimestamp);
    }
    try {
        build_block(four, {}, 200);
        FAIL("expected EmptyBatch");
    } catch (const LedgerError& e) {
        CHECK(e.code() == Errc::EmptyBatch);
    }
}

TEST_CASE("verify_chain reports the first tampered block") {
    auto chain = make_chain(10);
    CHECK(verify_chain(chain).ok);

    SUBCASE("transaction args") {
        chain[3].transactions[0].args[0] = 9999;
        auto r = verify_chain(chain);
        CHECK_FALSE(r.ok);
        CHECK(r.first_invalid_height == 3);
        CHECK(r.reason == ChainFault::MerkleMismatch);
    }
    SUBCASE("prev hash") {
        chain[7].header.prev_hash = digest("forged");
        auto r = verify_chain(chain);
        CHECK(r.first_invalid_height == 7);
        CHECK(r.reason == ChainFault::LinkMismatch);
    }
    SUBCASE("endorsement list") {
        chain[5].transactions[0].endorsements[0] = "peer0.org3.example.com";
        auto r = verify_chain(chain);
        CHECK(r.first_invalid_height == 5);
        CHECK(r.reason == ChainFault::MerkleMismatch);
    }
}

TEST_CASE("apply_block performs MVCC validation") {
    WorldState state;
    auto genesis = build_block(std::nullopt, {make_tx("InitLedger", Value::array(), {}, {{"K", "v0"}})}, 0);
    state = apply_block(state, genesis).state;
    for (int i = 0; i < 4; ++i) state.put("K", "bump");
    REQUIRE(state.version("K") == 5);

    auto t1 = make_tx("SetBuildingData", Value::array({1}), {{"K", 5}}, {{"K", "one"}}, 1);
    auto t2 = make_tx("SetBuildingData", Value::array({2}), {{"K", 5}}, {{"K", "two"}}, 2);
    auto t3 = make_tx("Fresh", Value::array(), {}, {{"fresh", 7}}, 3);
    auto block = build_block(genesis.header, {t1, t2, t3}, 10);
    auto res = apply_block(state, block);
    CHECK(res.codes == std::vector{ValidationCode::Valid, ValidationCode::MvccReadConflict, ValidationCode::Valid});
    CHECK(res.state.find("K")->value == "one");
    CHECK(res.state.version("K") == 6);
    CHECK(res.state.version("fresh") == 1);
    CHECK(res.state.height() == 1);

    BlockHeader skip = block.header;
    skip.height = 2;
    auto gap = build_block(skip, {t3}, 20);
    try {
        apply_block(state, gap);
        FAIL("expected HeightGap");
    } catch (const LedgerError& e) {
        CHECK(e.code() == Errc::HeightGap);
    }
}

TEST_CASE("endorsement policy and fee rules") {
    ValidationRules rules;
    rules.required_orgs = {"org1", "org2"};
    rules.peer_orgs = {{"peer0.org1.example.com", "org1"}, {"peer0.org2.example.com", "org2"}};
    WorldState state;
    auto tx = make_tx("m", Value::array(), {}, {{"a", 1}});
    CHECK(apply_transaction(state, tx, rules) == ValidationCode::Valid);
    tx.endorsements = {"peer0.org1.example.com"};
    CHECK(apply_transaction(state, tx, rules) == ValidationCode::EndorsementPolicyFailure);

    ValidationRules fees;
    fees.charge_fees = true;
    WorldState funded;
    funded.put("eth/gateway", Amount{100}.to_value());
    auto paid = make_tx("m", Value::array(), {}, {{"b", 1}});
    paid.fee_paid = Amount{60};
    CHECK(apply_transaction(funded, paid, fees) == ValidationCode::Valid);
    CHECK(Amount::from_value(funded.find("eth/gateway")->value) == Amount{40});
    CHECK(apply_transaction(funded, paid, fees) == ValidationCode::OutOfFunds);
    CHECK(funded.version("b") == 1);
    CHECK(Amount::from_value(funded.find("fees/collected")->value) == Amount{60});
}

TEST_CASE("property: replay is deterministic and versions only increase") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Block> chain;
        std::optional<BlockHeader> prev;
        WorldState shadow;
        std::map<std::string, std::uint64_t> last_version;
        std::uint64_t nonce = 0;
        for (int h = 0; h < 15; ++h) {
            std::vector<Transaction> txs;
            int n = 1 + static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i) {
                std::string key = "k" + std::to_string(rng() % 5);
                std::vector<ReadEntry> reads;
                if (rng() % 2) reads.push_back({key, shadow.version(key)});
                txs.push_back(make_tx("w", Value::array({static_cast<std::int64_t>(rng() % 100)}), reads,
                                      {{key, static_cast<std::int64_t>(rng() % 1000)}}, nonce++));
            }
            chain.push_back(build_block(prev, txs, h));
            prev = chain.back().header;
            shadow = apply_block(shadow, chain.back()).state;
            for (const auto& [key, e] : shadow.entries()) {
                CHECK(e.version >= last_version[key]);
                last_version[key] = e.version;
            }
        }
        auto a = replay(chain);
        auto b = replay(chain);
        CHECK(a.state.canonical() == b.state.canonical());
        CHECK(a.state == shadow);
    }
}

TEST_CASE("block store round-trips and detects single-byte corruption") {
    auto dir = temp_dir("store");
    BlockStore store(dir);
    auto chain = make_chain(6);
    for (const auto& b : chain) store.append(b);
    CHECK(store.tip_height() == 5);
    CHECK(*store.load(2) == chain[2]);
    CHECK(store.block_path(2).filename() == "000000000002.json");
    auto loaded = store.load_verified();
    CHECK(loaded.report.ok);
    CHECK(loaded.blocks == chain);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        std::int64_t h = static_cast<std::int64_t>(rng() % chain.size());
        auto path = store.block_path(h);
        std::string bytes = encode_block_file(chain[static_cast<std::size_t>(h)]);
        std::string corrupt = bytes;
        std::size_t pos = rng() % corrupt.size();
        corrupt[pos] = static_cast<char>(corrupt[pos] ^ static_cast<char>(1 + rng() % 255));
        std::ofstream(path, std::ios::binary | std::ios::trunc) << corrupt;
        auto r = store.load_verified().report;
        CHECK_FALSE(r.ok);
        CHECK(r.first_invalid_height <= h);
        std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
    }
    CHECK(store.load_verified().report.ok);
    std::filesystem::remove_all(dir);
}

TEST_CASE("amount parsing and rendering") {
    CHECK(Amount::from_decimal("0.235323").to_string() == "235323000000000000");
    CHECK(Amount::from_decimal("1").to_decimal(1) == "1.0");
    CHECK(Amount::from_decimal("0.1").to_decimal(6) == "0.100000");
    CHECK(Amount::gwei(1) == Amount{1'000'000'000});
    CHECK(Amount::from_units("-15").to_string() == "-15");
    CHECK_THROWS_AS(Amount::from_decimal("1.2.3"), LedgerError);
}
