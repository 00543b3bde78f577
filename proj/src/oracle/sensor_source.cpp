#include "twin/oracle/sensor_source.hpp"

#include <charconv>
#include <cmath>

#include <httplib.h>

namespace twin::oracle {

namespace {

__int128 pow10(int k) {
    __int128 p = 1;
    while (k-- > 0) p *= 10;
    return p;
}

__int128 floor_div(__int128 a, __int128 b) {
    __int128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace

std::int64_t scale_centi(double x) {
    if (!std::isfinite(x)) throw FetchError(FetchError::Kind::MalformedBody, "non-finite reading");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw FetchError(FetchError::Kind::MalformedBody, "unprintable reading");
    std::string_view text(buf, static_cast<std::size_t>(end - buf));

    bool negative = false;
    if (!text.empty() && text.front() == '-') {
        negative = true;
        text.remove_prefix(1);
    }
    int exponent = 0;
    if (auto e = text.find('e'); e != std::string_view::npos) {
        auto exp_text = text.substr(e + 1);
        if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        text = text.substr(0, e);
    }
    __int128 mantissa = 0;
    for (char c : text) {
        if (c == '.') continue;
        mantissa = mantissa * 10 + (c - '0');
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        exponent -= static_cast<int>(text.size() - dot - 1);
    }
    if (negative) mantissa = -mantissa;

    const int shift = exponent + 2;  // x * 100 = mantissa * 10^shift
    __int128 scaled;
    if (shift >= 0) {
        if (shift > 18) throw FetchError(FetchError::Kind::MalformedBody, "reading out of range");
        scaled = mantissa * pow10(shift);
    } else if (-shift > 30) {
        scaled = 0;
    } else {
        const __int128 d = pow10(-shift);
        scaled = floor_div(2 * mantissa + d, 2 * d);
    }
    if (scaled > INT64_MAX || scaled < INT64_MIN) {
        throw FetchError(FetchError::Kind::MalformedBody, "reading out of range");
    }
    return static_cast<std::int64_t>(scaled);
}

BuildingData parse_sensor_body(std::string_view body, TimestampMs fetched_at) {
    Value json = Value::parse(body, nullptr, false);
    if (json.is_discarded() || !json.is_object()) {
        throw FetchError(FetchError::Kind::MalformedBody, "sensor body is not a JSON object");
    }
    auto number = [&](std::initializer_list<const char*> keys) -> std::int64_t {
        for (const char* k : keys) {
            auto it = json.find(k);
            if (it == json.end()) continue;
            if (!it->is_number()) throw FetchError(FetchError::Kind::MalformedBody, std::string(k) + " is not numeric");
            return scale_centi(it->get<double>());
        }
        throw FetchError(FetchError::Kind::MalformedBody, std::string("missing ") + *keys.begin());
    };
    BuildingData d;
    d.temperature = number({"Temperature"});
    d.humidity = number({"Humidity"});
    d.co2_level = number({"CO2Level", "CO2"});
    d.lux_level = number({"LuxLevel"});
    d.as_of = fetched_at;
    return d;
}

HttpSensorSource::HttpSensorSource(std::string url, int timeout_ms) : timeout_ms_(timeout_ms) {
    const auto scheme = url.find("://");
    const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        origin_ = url;
        path_ = "/";
    } else {
        origin_ = url.substr(0, path_start);
        path_ = url.substr(path_start);
    }
}

BuildingData HttpSensorSource::fetch(TimestampMs now) {
    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
    auto res = client.Get(path_);
    if (!res) {
        throw FetchError(FetchError::Kind::Unreachable, origin_ + path_ + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw FetchError(FetchError::Kind::Unreachable, origin_ + path_ + " answered " + std::to_string(res->status));
    }
    return parse_sensor_body(res->body, now);
}

BuildingData SimulatorSensorSource::fetch(TimestampMs now) {
    return parse_sensor_body(sim_->sample().to_json().dump(), now);
}

} // namespace twin::oracle
