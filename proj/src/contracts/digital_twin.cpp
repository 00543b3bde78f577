#include "twin/contracts/building_data.hpp"
#include "twin/contracts/standard_contracts.hpp"
#include "twin/ledger/canonical.hpp"

namespace twin::contracts {

namespace {

const std::string kKey(kBuildingDataKey);

void store(ExecutionContext& ctx, const BuildingData& data) {
    ctx.put(kKey, ledger::canonical_encode(data.to_json()));
}

} // namespace

Value DigitalTwinContract::invoke(ExecutionContext& ctx, std::string_view method) const {
    if (method == kConstructor) return nullptr;

    if (method == "InitLedger") {
        BuildingData data = kDefaultBuildingData;
        data.as_of = ctx.env().timestamp;
        store(ctx, data);
        return nullptr;
    }

    if (method == "SetBuildingData") {
        BuildingData data;
        data.temperature = ctx.arg_int(0);
        data.humidity = ctx.arg_int(1);
        data.co2_level = ctx.arg_int(2);
        data.lux_level = ctx.arg_int(3);
        data.as_of = ctx.env().timestamp;
        if (data.humidity < 0 || data.co2_level < 0 || data.lux_level < 0) {
            throw ContractError(ContractError::Kind::BadArgument, "humidity, CO2Level and luxLevel must be non-negative");
        }
        // Read-modify-write: concurrent setters in one block conflict under MVCC.
        ctx.get(kKey);
        store(ctx, data);
        return nullptr;
    }

    if (method == "GetBuildingData") {
        auto raw = ctx.get(kKey);
        if (!raw || !raw->is_string() || raw->get_ref<const std::string&>().empty()) {
            throw ContractError(ContractError::Kind::NotFound, std::string(kBuildingDataNotFound));
        }
        return Value::parse(raw->get<std::string>());
    }

    throw ContractError(ContractError::Kind::UnknownMethod, "DigitalTwinContract has no method " + std::string(method));
}

bool DigitalTwinContract::is_read_only(std::string_view method) const {
    return method == "GetBuildingData";
}

} // namespace twin::contracts
