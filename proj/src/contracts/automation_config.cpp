#include "twin/contracts/building_data.hpp"
#include "twin/contracts/standard_contracts.hpp"

namespace twin::contracts {

namespace {

Threshold require_threshold(std::string_view field) {
    if (auto t = parse_threshold(field)) return *t;
    throw ContractError(ContractError::Kind::UnknownThreshold, "unknown threshold " + std::string(field));
}

// "setMaxTemperature" -> "maxTemperature"
std::string field_from_method(std::string_view method) {
    std::string field(method.substr(3));
    if (!field.empty() && field[0] >= 'A' && field[0] <= 'Z') field[0] = static_cast<char>(field[0] - 'A' + 'a');
    return field;
}

std::int64_t read_threshold(ExecutionContext& ctx, Threshold t) {
    auto v = ctx.get(BuildingAutomationConfig::key(field_name(t)));
    return v && v->is_number_integer() ? v->get<std::int64_t>() : 0;
}

void write_threshold(ExecutionContext& ctx, Threshold t, std::int64_t value) {
    auto owner = ctx.get(BuildingAutomationConfig::key("owner"));
    if (!owner || *owner != ctx.submitter()) {
        throw ContractError(ContractError::Kind::NotAuthorized, std::string(kNotAuthorized));
    }
    if (!is_signed(t) && value < 0) {
        throw ContractError(ContractError::Kind::BadArgument, std::string(field_name(t)) + " is unsigned");
    }
    const std::string field(field_name(t));
    ctx.put(BuildingAutomationConfig::key(field), value);
    ctx.emit(capitalized_name(t) + "Updated", Value{{field, value}});
}

} // namespace

std::string BuildingAutomationConfig::key(std::string_view field) {
    return std::string(kBuildingAutomationConfig) + "/" + std::string(field);
}

Value BuildingAutomationConfig::invoke(ExecutionContext& ctx, std::string_view method) const {
    if (method == kConstructor) {
        ctx.put(key("owner"), ctx.submitter());
        return nullptr;
    }
    if (method == "owner") {
        auto owner = ctx.get(key("owner"));
        return owner ? *owner : Value("");
    }
    if (method == "setThreshold") {
        write_threshold(ctx, require_threshold(ctx.arg_string(0)), ctx.arg_int(1));
        return nullptr;
    }
    if (method == "getThreshold") {
        return read_threshold(ctx, require_threshold(ctx.arg_string(0)));
    }
    if (method == "getConfig") {
        Value out = Value::object();
        for (auto t : kAllThresholds) out[std::string(field_name(t))] = read_threshold(ctx, t);
        auto owner = ctx.get(key("owner"));
        out["owner"] = owner ? *owner : Value("");
        return out;
    }
    if (method.size() > 3 && method.substr(0, 3) == "set") {
        write_threshold(ctx, require_threshold(field_from_method(method)), ctx.arg_int(0));
        return nullptr;
    }
    if (method.size() > 3 && method.substr(0, 3) == "get") {
        return read_threshold(ctx, require_threshold(field_from_method(method)));
    }
    throw ContractError(ContractError::Kind::UnknownMethod, "BuildingAutomationConfig has no method " + std::string(method));
}

bool BuildingAutomationConfig::is_read_only(std::string_view method) const {
    return method == "owner" || (method.size() > 3 && method.substr(0, 3) == "get");
}

} // namespace twin::contracts
