#include <doctest.h>

#include <cmath>
#include <random>

#include <httplib.h>

#include "twin/sim/sensor_server.hpp"

using namespace twin;
using namespace twin::sim;

TEST_CASE("step follows the Euler update") {
    EnvState eq;
    eq.temperature = 24.0;
    auto same = step(eq, {}, 10.0);
    CHECK(same.temperature == doctest::Approx(24.0));

    DeviceState fan3;
    fan3.fan_level = 3;
    CHECK(step(eq, fan3, 1.0).temperature < 24.0);

    EnvState hot;
    hot.temperature = 30.0;
    CHECK(step(hot, fan3, 10.0).temperature == doctest::Approx(29.76));
    CHECK(step(hot, fan3, 10.0).sim_time == 10.0);

    CHECK_THROWS_AS(step(hot, fan3, 0.0), SimError);
    CHECK_THROWS_AS(step(hot, fan3, -1.0), SimError);
}

TEST_CASE("daylight and lux") {
    PlantParams p;
    CHECK(sim::daylight(0.0, p) == doctest::Approx(0.0));
    CHECK(sim::daylight(21600.0, p) == doctest::Approx(500.0));
    CHECK(sim::daylight(64800.0, p) == 0.0);
    DeviceState bulb;
    bulb.bulb_brightness = 100;
    EnvState e;
    CHECK(step(e, bulb, 1.0).lux == doctest::Approx(sim::daylight(1.0, p) + 300.0));
}

TEST_CASE("apply_command") {
    DeviceState d;
    auto fan2 = apply_command(d, DeviceCommand::set_level(Device::Fan, 2));
    CHECK(fan2.fan_level == 2);
    CHECK(apply_command(fan2, DeviceCommand::set_level(Device::Fan, 2)) == fan2);
    CHECK(apply_command(d, DeviceCommand::on(Device::Heater)).heater_on);
    CHECK(apply_command(d, DeviceCommand::on(Device::Humidifier)).humidifier_on);
    CHECK(apply_command(d, DeviceCommand::set_level(Device::Purifier, 3)).purifier_level == 3);
    try {
        apply_command(d, DeviceCommand::set_level(Device::Bulb, 150));
        FAIL("expected RangeViolation");
    } catch (const SimError& e) {
        CHECK(e.kind() == SimError::Kind::RangeViolation);
    }
    CHECK_THROWS_AS(apply_command(d, DeviceCommand::set_level(Device::Fan, -1)), SimError);
    CHECK_THROWS_AS(apply_command(d, DeviceCommand{Device::Fan, Action::SetLevel, std::nullopt}), SimError);
    CHECK_THROWS_AS(apply_command(d, DeviceCommand{Device::Fan, Action::On, 2}), SimError);

    auto cmd = DeviceCommand::set_level(Device::Bulb, 40);
    CHECK(DeviceCommand::from_json(cmd.to_json()) == cmd);
    CHECK_THROWS_AS(DeviceCommand::from_json(Value{{"device", "toaster"}, {"action", "on"}}), SimError);
}

TEST_CASE("read_sensors quantizes and is deterministic") {
    EnvState e{22.46, 48.04, 410.4, 299.6, 5.0};
    auto exact = read_sensors(e, 0.0, 1);
    CHECK(exact.temperature == doctest::Approx(22.5));
    CHECK(exact.humidity == doctest::Approx(48.0));
    CHECK(exact.co2_level == 410.0);
    CHECK(exact.lux_level == 300.0);
    CHECK(exact.fetched_at == 5000);

    CHECK(read_sensors(e, 0.5, 42) == read_sensors(e, 0.5, 42));
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto r = read_sensors(e, 0.5, seed);
        CHECK(std::abs(r.temperature - e.temperature) <= 0.5 + 0.05 + 1e-9);
        CHECK(std::abs(r.humidity - e.humidity) <= 0.5 + 0.05 + 1e-9);
        CHECK(std::abs(r.co2_level - e.co_level) <= 0.5 + 0.5);
        CHECK(std::abs(r.lux_level - e.lux) <= 0.5 + 0.5);
    }
}

TEST_CASE("plant stays bounded for every fixed device state") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        EnvState e{50.0 * u(rng), 100.0 * u(rng), 5000.0 * u(rng), 100000.0 * u(rng), 0.0};
        DeviceState d{static_cast<int>(rng() % 4), rng() % 2 == 0, static_cast<int>(rng() % 101),
                      static_cast<int>(rng() % 4), rng() % 2 == 0};
        for (int i = 0; i < 1'000'000 / 8; ++i) e = step(e, d, 1.0);
        CHECK(std::isfinite(e.temperature));
        CHECK(e.temperature > -50.0);
        CHECK(e.temperature < 100.0);
        CHECK(e.humidity >= 0.0);
        CHECK(e.humidity <= 100.0);
        CHECK(e.co_level >= 0.0);
        CHECK(e.lux >= 0.0);
    }
}

TEST_CASE("actuation is monotone") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        EnvState e{50.0 * u(rng), 100.0 * u(rng), 1.0 + 4999.0 * u(rng), 0.0, 86400.0 * u(rng)};
        DeviceState base{static_cast<int>(rng() % 3), false, static_cast<int>(rng() % 100),
                         static_cast<int>(rng() % 3), false};
        const auto b = step(e, base, 1.0);
        auto more = base;
        more.fan_level += 1;
        CHECK(step(e, more, 1.0).temperature < b.temperature);
        more = base;
        more.heater_on = true;
        CHECK(step(e, more, 1.0).temperature > b.temperature);
        more = base;
        more.humidifier_on = true;
        CHECK(step(e, more, 1.0).humidity >= b.humidity);
        more = base;
        more.purifier_level += 1;
        CHECK(step(e, more, 1.0).co_level < b.co_level);
        more = base;
        more.bulb_brightness += 1;
        CHECK(step(e, more, 1.0).lux > b.lux);
    }
}

TEST_CASE("simulator ticks and the endpoint agree with read_sensors") {
    SimConfig cfg;
    cfg.noise_amplitude = 0.3;
    cfg.seed = 99;
    cfg.initial.temperature = 30.0;
    auto sim = std::make_shared<BuildingSimulator>(cfg);
    sim->apply(DeviceCommand::set_level(Device::Fan, 3));
    sim->advance_to(10'500);
    CHECK(sim->ticks() == 10);
    CHECK(sim->env().temperature == doctest::Approx(29.76).epsilon(1e-3));
    CHECK(sim->sample() == read_sensors(sim->env(), 0.3, tick_seed(99, 10)));

    SensorServer server(sim);
    const int port = server.start();
    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/");
    REQUIRE(res);
    CHECK(res->status == 200);
    auto body = Value::parse(res->body);
    CHECK(body == sim->sample().to_json());
    CHECK(body.contains("CO2"));
    CHECK(body.contains("CO2Level"));
    server.stop();
}

TEST_CASE("sim config") {
    auto c = SimConfig::from_json(Value::parse(R"({"dt_ms":500,"t_ambient":20,"seed":4,"initial":{"temperature":30}})"));
    CHECK(c.dt_ms == 500);
    CHECK(c.params.t_ambient == 20.0);
    CHECK(c.seed == 4);
    CHECK(c.initial.temperature == 30.0);
    CHECK_THROWS(SimConfig::from_json(Value{{"dt_ms", 0}}));
}
