#include <algorithm>

#include "twin/contracts/building_data.hpp"
#include "twin/contracts/standard_contracts.hpp"
#include "twin/ledger/canonical.hpp"

namespace twin::contracts {

namespace {

using ledger::Amount;
using ledger::canonical_encode;
using K = ContractError::Kind;

Value load_json(ExecutionContext& ctx, const std::string& key, Value fallback) {
    auto raw = ctx.get(key);
    if (!raw || !raw->is_string()) return fallback;
    return Value::parse(raw->get<std::string>());
}

std::string request_key(std::string_view id) {
    return MultiWordConsumer::key("request/" + std::string(id));
}

} // namespace

std::string MultiWordConsumer::key(std::string_view field) {
    return std::string(kMultiWordConsumer) + "/" + std::string(field);
}

Value MultiWordConsumer::invoke(ExecutionContext& ctx, std::string_view method) const {
    const std::string self(kMultiWordConsumer);

    if (method == kConstructor) {
        ctx.put(key("owner"), ctx.submitter());
        ctx.put(key("oracle"), ctx.arg_string(0));
        return nullptr;
    }

    if (method == "requestMultipleParameters") {
        const Amount fee = ctx.env().fees_enabled ? kOracleRequestFee : Amount::zero();
        if (ctx.env().fees_enabled) {
            if (link_balance(ctx, self) < fee) {
                throw ContractError(K::InsufficientFee, "consumer LINK balance below the oracle fee");
            }
            link_transfer(ctx, self, kOracleEscrow, fee);
        }
        auto counter_v = ctx.get(key("counter"));
        std::int64_t counter = (counter_v ? counter_v->get<std::int64_t>() : 0) + 1;
        ctx.put(key("counter"), counter);

        const std::string id =
            ledger::digest(canonical_encode(Value{{"contract", self}, {"counter", counter}, {"height", ctx.env().height}}))
                .hex();
        Value request{{"created_at", ctx.env().timestamp}, {"fee", fee.to_value()}, {"requester", self},
                      {"status", "pending"}};
        ctx.put(request_key(id), canonical_encode(request));

        Value pending = load_json(ctx, key("pending"), Value::array());
        pending.push_back(id);
        ctx.put(key("pending"), canonical_encode(pending));

        ctx.emit("ChainlinkRequested",
                 Value{{"fee", fee.to_value()},
                       {"id", id},
                       {"paths", Value{{"CO2Level", "CO2"}, {"humidity", "Humidity"}, {"luxLevel", "LuxLevel"},
                                       {"temperature", "Temperature"}}}});
        return id;
    }

    if (method == "fulfillMultipleParameters") {
        const std::string id = ctx.arg_string(0);
        auto oracle = ctx.get(key("oracle"));
        if (!oracle || *oracle != ctx.submitter()) {
            throw ContractError(K::NotOracle, "Source must be the oracle of the request");
        }
        auto raw = ctx.get(request_key(id));
        if (!raw) throw ContractError(K::UnknownRequest, "unknown request " + id);
        Value request = Value::parse(raw->get<std::string>());
        if (request.at("status") != "pending") throw ContractError(K::AlreadyFulfilled, "request already fulfilled");

        BuildingData data;
        data.temperature = ctx.arg_int(1);
        data.humidity = ctx.arg_int(2);
        data.co2_level = ctx.arg_int(3);
        data.lux_level = ctx.arg_int(4);
        data.as_of = ctx.env().timestamp;
        ctx.put(key("data"), canonical_encode(data.to_json()));

        request["status"] = "fulfilled";
        ctx.put(request_key(id), canonical_encode(request));
        Value pending = load_json(ctx, key("pending"), Value::array());
        pending.erase(std::remove(pending.begin(), pending.end(), Value(id)), pending.end());
        ctx.put(key("pending"), canonical_encode(pending));

        const Amount fee = Amount::from_value(request.at("fee"));
        if (fee > Amount::zero()) link_transfer(ctx, kOracleEscrow, ctx.submitter(), fee);

        ctx.emit("RequestMultipleFulfilled", Value{{"CO2Level", data.co2_level},
                                                   {"humidity", data.humidity},
                                                   {"luxLevel", data.lux_level},
                                                   {"requestId", id},
                                                   {"temperature", data.temperature}});
        return nullptr;
    }

    if (method == "withdrawLink") {
        auto owner = ctx.get(key("owner"));
        if (!owner || *owner != ctx.submitter()) throw ContractError(K::NotAuthorized, std::string(kNotAuthorized));
        const Amount balance = link_balance(ctx, self);
        link_transfer(ctx, self, ctx.submitter(), balance);
        return balance.to_value();
    }

    if (method == "getBuildingData") {
        auto raw = ctx.get(key("data"));
        if (!raw) throw ContractError(K::NotFound, std::string(kBuildingDataNotFound));
        return Value::parse(raw->get<std::string>());
    }
    if (method == "getPendingRequests") return load_json(ctx, key("pending"), Value::array());
    if (method == "getRequest") {
        auto raw = ctx.get(request_key(ctx.arg_string(0)));
        if (!raw) throw ContractError(K::UnknownRequest, "unknown request");
        return Value::parse(raw->get<std::string>());
    }
    if (method == "owner" || method == "oracle") {
        auto v = ctx.get(key(method));
        return v ? *v : Value("");
    }

    throw ContractError(K::UnknownMethod, "MultiWordConsumer has no method " + std::string(method));
}

bool MultiWordConsumer::is_read_only(std::string_view method) const {
    return method == "getBuildingData" || method == "getPendingRequests" || method == "getRequest" ||
           method == "owner" || method == "oracle";
}

} // namespace twin::contracts
