#include <doctest.h>

#include <filesystem>
#include <random>

#include "twin/consensus/config.hpp"
#include "twin/consensus/fabric_network.hpp"
#include "twin/consensus/public_chain.hpp"
#include "twin/contracts/standard_contracts.hpp"

using namespace twin;
using namespace twin::consensus;
using contracts::ContractError;
using ledger::Amount;
using ledger::ValidationCode;

namespace {

const std::string kPeer1 = "peer0.org1.example.com";
const std::string kPeer2 = "peer0.org2.example.com";
const std::string kTwin(contracts::kDigitalTwinContract);

struct FabricFixture {
    std::shared_ptr<VirtualClock> clock = std::make_shared<VirtualClock>();
    FabricNetwork net{FabricNetwork::Options{}, contracts::standard_registry(), clock};

    FabricFixture() {
        net.install(kTwin);
        net.collect_and_submit({kTwin, "constructor", Value::array(), "admin"});
        settle();
        net.collect_and_submit({kTwin, "InitLedger", Value::array(), "admin"});
        settle();
    }

    void settle() {
        clock->advance(net.ordering().batch_timeout_ms);
        net.advance(clock->now_ms());
    }
};

Invocation set_data(std::int64_t t, std::string who = "gateway") {
    return {kTwin, "SetBuildingData", Value::array({t, 4800, 41000, 12000}), std::move(who)};
}

ledger::Transaction dummy_tx(int i) {
    ledger::Transaction tx;
    tx.contract = "c";
    tx.method = "m";
    tx.nonce = static_cast<std::uint64_t>(i);
    tx.seal();
    return tx;
}

const std::string kAlice = "0xa11ce";
const std::string kBob = "0xb0b";
const std::string kPoor = "0x0";

PublicChain::Options public_options() {
    PublicChain::Options o;
    o.genesis_accounts = {
        {kAlice, Amount::from_decimal("10"), Amount::from_decimal("5"), true},
        {kBob, Amount::from_decimal("10"), Amount::from_decimal("5"), true},
        {kPoor, Amount::zero(), Amount::zero(), false},
    };
    return o;
}

Amount total_eth(const PublicChain& chain) {
    Amount sum;
    for (const auto& a : chain.accounts()) sum += a.eth_balance;
    return sum + chain.fees_collected();
}

} // namespace

TEST_CASE("endorse simulates without committing") {
    FabricFixture f;
    auto e = f.net.endorse(set_data(2250), kPeer1);
    REQUIRE(e.write_set.size() == 1);
    CHECK(e.write_set[0].key == "BuildingData");
    CHECK(e.peer == kPeer1);
    CHECK(f.net.query({kTwin, "GetBuildingData", Value::array(), "x"})["temperature"] == 2200);

    auto r = f.net.endorse({kTwin, "GetBuildingData", Value::array(), "x"}, kPeer2);
    CHECK(r.write_set.empty());
    REQUIRE(r.read_set.size() == 1);
    CHECK(r.read_set[0].key == "BuildingData");

    CHECK_THROWS_AS(f.net.endorse({"BuildingAutomationConfig", "getConfig", Value::array(), "x"}, kPeer1),
                    ContractError);
    try {
        f.net.endorse(set_data(1), "peer9.org9");
        FAIL("expected UnknownPeer");
    } catch (const BackendError& e2) {
        CHECK(e2.kind() == BackendError::Kind::UnknownPeer);
    }
    try {
        f.net.endorse({kTwin, "SetBuildingData", Value::array({"abc", 1, 1, 1}), "x"}, kPeer1);
        FAIL("expected BadArgument");
    } catch (const ContractError& e3) {
        CHECK(e3.kind() == ContractError::Kind::BadArgument);
    }
}

TEST_CASE("collect_and_submit enforces agreement and policy") {
    FabricFixture f;
    auto tx = f.net.collect_and_submit(set_data(2300));
    CHECK(tx.endorsements.size() == 2);
    CHECK(f.net.pending_count() == 1);

    SUBCASE("divergent peer") {
        f.net.set_fault(kPeer2, {false, true});
        try {
            f.net.collect_and_submit(set_data(2400));
            FAIL("expected EndorsementMismatch");
        } catch (const BackendError& e) {
            CHECK(e.kind() == BackendError::Kind::EndorsementMismatch);
        }
    }
    SUBCASE("unreachable org") {
        f.net.set_fault(kPeer1, {true, false});
        try {
            f.net.collect_and_submit(set_data(2400));
            FAIL("expected PolicyUnsatisfied");
        } catch (const BackendError& e) {
            CHECK(e.kind() == BackendError::Kind::PolicyUnsatisfied);
        }
    }
    SUBCASE("narrower policy fails validation at commit") {
        auto weak = f.net.collect_and_submit(set_data(2500), {"org1.example.com"});
        f.settle();
        auto where = f.net.locate(weak.tx_id.hex());
        REQUIRE(where);
        CHECK(f.net.block(where->first)->validation_codes[where->second] == ValidationCode::EndorsementPolicyFailure);
    }
    CHECK(f.net.pending_count() <= 1);
}

TEST_CASE("order_batch cuts on size or timeout") {
    OrderingParams p;
    std::deque<PendingTx> q;
    for (int i = 0; i < 10; ++i) q.push_back({dummy_tx(i), 1000});
    auto b = order_batch(q, p, 1000, std::nullopt);
    REQUIRE(b);
    REQUIRE(b->transactions.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(b->transactions[i].nonce == static_cast<std::uint64_t>(i));
    CHECK(q.empty());

    for (int i = 0; i < 3; ++i) q.push_back({dummy_tx(i), 1000});
    CHECK_FALSE(order_batch(q, p, 1500, b->header));
    auto late = order_batch(q, p, 3100, b->header);
    REQUIRE(late);
    CHECK(late->transactions.size() == 3);
    CHECK(late->height() == 1);
}

TEST_CASE("permissioned liveness and MVCC between concurrent setters") {
    FabricFixture f;
    std::vector<std::string> ids;
    for (int i = 0; i < 25; ++i) {
        ids.push_back(f.net.submit({kTwin, "GetBuildingData", Value::array(), "reader" + std::to_string(i)}).id);
        f.clock->advance(100);
        f.net.advance(f.clock->now_ms());
    }
    f.clock->advance(f.net.ordering().batch_timeout_ms);
    f.net.advance(f.clock->now_ms());
    CHECK(f.net.pending_count() == 0);
    for (const auto& id : ids) {
        auto r = f.net.receipt(id);
        REQUIRE(r);
        CHECK(r->status == TxStatus::Committed);
    }

    auto a = f.net.collect_and_submit(set_data(2300));
    auto b = f.net.collect_and_submit(set_data(2400));
    f.settle();
    CHECK(f.net.receipt(a.tx_id.hex())->code == ValidationCode::Valid);
    CHECK(f.net.receipt(b.tx_id.hex())->code == ValidationCode::MvccReadConflict);
    CHECK(f.net.query({kTwin, "GetBuildingData", Value::array(), "x"})["temperature"] == 2300);
    CHECK(ledger::verify_chain(f.net.blocks()).ok);
}

TEST_CASE("commit listeners see only valid events") {
    FabricFixture f;
    f.net.install(std::string(contracts::kBuildingAutomationConfig));
    std::vector<ContractEvent> seen;
    f.net.on_commit([&](const ledger::Block&, const std::vector<ContractEvent>& ev) {
        seen.insert(seen.end(), ev.begin(), ev.end());
    });
    const std::string cfg(contracts::kBuildingAutomationConfig);
    f.net.collect_and_submit({cfg, "constructor", Value::array(), "owner"});
    f.settle();
    f.net.collect_and_submit({cfg, "setMaxTemperature", Value::array({2600}), "owner"});
    f.settle();
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].name == "MaxTemperatureUpdated");
    CHECK(seen[0].payload == Value{{"maxTemperature", 2600}});
}

TEST_CASE("fabric resumes from a persisted store") {
    auto dir = std::filesystem::temp_directory_path() / "twin_fabric_resume";
    std::filesystem::remove_all(dir);
    auto clock = std::make_shared<VirtualClock>();
    FabricNetwork::Options opts;
    opts.store_dir = dir;
    std::string tip;
    {
        FabricNetwork net(opts, contracts::standard_registry(), clock);
        net.install(kTwin);
        net.collect_and_submit({kTwin, "constructor", Value::array(), "admin"});
        clock->advance(3000);
        net.advance(clock->now_ms());
        net.collect_and_submit({kTwin, "InitLedger", Value::array(), "admin"});
        clock->advance(3000);
        net.advance(clock->now_ms());
        tip = net.blocks().back().header.hash().hex();
    }
    FabricNetwork again(opts, contracts::standard_registry(), clock);
    again.install(kTwin);
    CHECK(again.height() == 2);
    CHECK(again.blocks().back().header.hash().hex() == tip);
    auto tx = again.collect_and_submit({kTwin, "InitLedger", Value::array(), "admin"});
    CHECK(tx.nonce == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("compute_fee reproduces the deployment costs") {
    GasSchedule s;
    auto bac = compute_fee(821'489, s);
    CHECK(bac.fee.to_double() == doctest::Approx(0.009776).epsilon(0.005));
    auto mwc = compute_fee(1'857'505, s);
    CHECK(mwc.fee.to_double() == doctest::Approx(0.022072).epsilon(0.005));
    CHECK(compute_fee(0, s).fee == Amount::zero());
    // exact integer product
    CHECK(bac.fee.to_string() == "9761425191400000");
    CHECK(bac.usd == doctest::Approx(bac.fee.to_double() * 3283.5));
}

TEST_CASE("public chain slots, cap and fees") {
    auto clock = std::make_shared<VirtualClock>();
    PublicChain chain(public_options(), contracts::standard_registry(), clock);
    CHECK(chain.stakers() == std::vector<std::string>{kAlice, kBob});
    CHECK(chain.proposer_index(5) == 1);
    CHECK_FALSE(chain.propose_slot(1));

    const Amount before = total_eth(chain);
    for (int i = 0; i < 100; ++i) {
        chain.public_submit({"LinkToken", "transfer", Value::array({kBob, "1"}), kAlice});
    }
    auto b = chain.propose_slot(1);
    REQUIRE(b);
    CHECK(b->transactions.size() == 30);
    CHECK(chain.pending_count() == 70);
    CHECK(b->transactions[0].endorsements == std::vector<std::string>{kBob});
    CHECK(total_eth(chain) == before);
    CHECK(chain.fees_collected() == compute_fee(50'000, chain.schedule()).fee * 30);

    auto poor = chain.public_submit({"LinkToken", "transfer", Value::array({kBob, "0"}), kPoor});
    clock->advance(10'000);
    chain.advance(clock->now_ms());
    CHECK(chain.pending_count() == 0);
    auto r = chain.receipt(poor.id);
    REQUIRE(r);
    CHECK(r->status == TxStatus::Committed);
    CHECK(r->code == ValidationCode::OutOfFunds);
    CHECK(chain.account(kPoor).eth_balance == Amount::zero());
    CHECK(total_eth(chain) == before);
    CHECK(chain.account(kBob).link_balance == Amount::from_decimal("5") + Amount{100});

    CHECK_THROWS_AS(chain.public_submit({"LinkToken", "transfer", Value::array({kBob, "1"}), "0xnobody"}),
                    BackendError);
    CHECK(ledger::verify_chain(chain.blocks()).ok);
}

TEST_CASE("deployment is charged its deploy gas") {
    auto clock = std::make_shared<VirtualClock>();
    PublicChain chain(public_options(), contracts::standard_registry(), clock);
    const std::string cfg(contracts::kBuildingAutomationConfig);
    chain.public_submit({cfg, "constructor", Value::array(), kAlice});
    auto b = chain.propose_slot(1);
    REQUIRE(b);
    CHECK(b->transactions[0].fee_paid == compute_fee(821'489, chain.schedule()).fee);
    CHECK(chain.account(kAlice).eth_balance == Amount::from_decimal("10") - compute_fee(821'489, chain.schedule()).fee);
}

TEST_CASE("public throughput never exceeds the cap over a 10 s window") {
    auto clock = std::make_shared<VirtualClock>();
    PublicChain chain(public_options(), contracts::standard_registry(), clock);
    for (int i = 0; i < 500; ++i) chain.public_submit({"LinkToken", "transfer", Value::array({kBob, "1"}), kAlice});
    for (int s = 0; s < 20; ++s) {
        clock->advance(1000);
        chain.advance(clock->now_ms());
    }
    auto blocks = chain.blocks();
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        std::size_t in_window = 0;
        const auto start = blocks[i].header.timestamp;
        for (std::size_t j = i; j < blocks.size() && blocks[j].header.timestamp < start + 10'000; ++j) {
            in_window += blocks[j].transactions.size();
        }
        CHECK(in_window <= 300);
    }
    CHECK(chain.committed_tx_count() == 1 + 500);
    CHECK(blocks.size() == 1 + 17);
}

TEST_CASE("no stakers") {
    auto clock = std::make_shared<VirtualClock>();
    auto opts = public_options();
    for (auto& a : opts.genesis_accounts) a.staked = false;
    PublicChain chain(opts, contracts::standard_registry(), clock);
    chain.public_submit({"LinkToken", "transfer", Value::array({kBob, "1"}), kAlice});
    try {
        chain.propose_slot(1);
        FAIL("expected NoStakers");
    } catch (const BackendError& e) {
        CHECK(e.kind() == BackendError::Kind::NoStakers);
    }
}

TEST_CASE("identical traces give identical chains") {
    auto run_public = [](std::uint32_t seed) {
        auto clock = std::make_shared<VirtualClock>();
        PublicChain chain(public_options(), contracts::standard_registry(), clock);
        std::mt19937 rng(seed);
        for (int i = 0; i < 200; ++i) {
            const auto& from = rng() % 2 ? kAlice : kBob;
            const auto& to = rng() % 2 ? kAlice : kBob;
            chain.public_submit({"LinkToken", "transfer", Value::array({to, std::to_string(rng() % 1000)}), from});
            clock->advance(rng() % 200);
            chain.advance(clock->now_ms());
        }
        clock->advance(10'000);
        chain.advance(clock->now_ms());
        return chain.blocks();
    };
    auto run_fabric = [](std::uint32_t seed) {
        FabricFixture f;
        std::mt19937 rng(seed);
        for (int i = 0; i < 60; ++i) {
            f.net.submit(set_data(static_cast<std::int64_t>(rng() % 4000)));
            f.clock->advance(rng() % 700);
            f.net.advance(f.clock->now_ms());
        }
        f.settle();
        return f.net.blocks();
    };
    CHECK(run_public(7) == run_public(7));
    CHECK(run_fabric(9) == run_fabric(9));
    CHECK(run_fabric(9) != run_fabric(10));
}

TEST_CASE("config parsing") {
    auto c = ConsensusConfig::from_json(Value::parse(R"({"max_block_txs":5,"batch_timeout_ms":500,
        "gas_price_gwei":20,"per_block_tx_cap":12,"slot_ms":2000,"eth_usd":3000.0,"channel":"c1"})"));
    CHECK(c.ordering.max_block_txs == 5);
    CHECK(c.ordering.batch_timeout_ms == 500);
    CHECK(c.gas.gas_price == Amount::gwei(20));
    CHECK(c.gas.per_block_tx_cap == 12);
    CHECK(c.gas.slot_ms == 2000);
    CHECK(c.rates.eth_usd == 3000.0);
    CHECK(c.rates.link_usd == 20.2);
    CHECK(c.topology.channel == "c1");
    CHECK(c.topology.peers.size() == 2);
    CHECK_THROWS(ConsensusConfig::from_json(Value{{"max_block_txs", 0}}));
    auto round = ConsensusConfig::from_json(c.to_json());
    CHECK(round.gas.gas_price == c.gas.gas_price);
}
