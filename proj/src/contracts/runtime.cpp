#include "twin/contracts/runtime.hpp"

#include <charconv>

#include "twin/contracts/standard_contracts.hpp"
#include "twin/ledger/canonical.hpp"

namespace twin::contracts {

const char* to_string(ContractError::Kind kind) noexcept {
    using K = ContractError::Kind;
    switch (kind) {
        case K::UnknownContract: return "UnknownContract";
        case K::UnknownMethod: return "UnknownMethod";
        case K::AlreadyDeployed: return "AlreadyDeployed";
        case K::BadArgument: return "BadArgument";
        case K::NotFound: return "NotFound";
        case K::NotAuthorized: return "NotAuthorized";
        case K::UnknownThreshold: return "UnknownThreshold";
        case K::InsufficientFee: return "InsufficientFee";
        case K::InsufficientBalance: return "InsufficientBalance";
        case K::UnknownRequest: return "UnknownRequest";
        case K::AlreadyFulfilled: return "AlreadyFulfilled";
        case K::NotOracle: return "NotOracle";
    }
    return "Unknown";
}

Value Invocation::to_json() const {
    return Value{{"args", args}, {"contract", contract}, {"method", method}, {"submitter", submitter}};
}

std::optional<Value> ExecutionContext::get(const std::string& key) {
    if (auto it = writes_.find(key); it != writes_.end()) return it->second;
    const auto* entry = state_.find(key);
    reads_.try_emplace(key, entry ? entry->version : 0);
    if (!entry) return std::nullopt;
    return entry->value;
}

std::optional<Value> ExecutionContext::peek(std::string_view key) const {
    const auto* entry = state_.find(key);
    if (!entry) return std::nullopt;
    return entry->value;
}

void ExecutionContext::put(const std::string& key, Value value) {
    if (!value.is_string() && !value.is_number_integer()) {
        throw std::logic_error("world-state values must be strings or integers: " + key);
    }
    writes_[key] = std::move(value);
}

void ExecutionContext::emit(std::string name, Value payload) {
    ledger::ensure_canonical(payload);
    events_.push_back({std::move(name), std::move(payload)});
}

std::size_t ExecutionContext::arg_count() const {
    return invocation_.args.is_array() ? invocation_.args.size() : 0;
}

std::string ExecutionContext::arg_string(std::size_t i) const {
    if (i >= arg_count()) throw ContractError(ContractError::Kind::BadArgument, "missing argument " + std::to_string(i));
    const auto& v = invocation_.args[i];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    throw ContractError(ContractError::Kind::BadArgument, "argument " + std::to_string(i) + " is not a string");
}

std::int64_t ExecutionContext::arg_int(std::size_t i) const {
    if (i >= arg_count()) throw ContractError(ContractError::Kind::BadArgument, "missing argument " + std::to_string(i));
    const auto& v = invocation_.args[i];
    if (v.is_number_integer()) {
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
            throw ContractError(ContractError::Kind::BadArgument, "argument out of range");
        }
        return v.get<std::int64_t>();
    }
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        std::int64_t out = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec == std::errc{} && ptr == s.data() + s.size() && !s.empty()) return out;
    }
    throw ContractError(ContractError::Kind::BadArgument,
                        "argument " + std::to_string(i) + " is not an integer: " + v.dump());
}

ExecutionResult ExecutionContext::finish(Value result) && {
    ExecutionResult out;
    out.result = std::move(result);
    for (auto& [key, version] : reads_) out.read_set.push_back({key, version});
    for (auto& [key, value] : writes_) out.write_set.push_back({key, std::move(value)});
    out.events = std::move(events_);
    return out;
}

void ContractRegistry::add(std::shared_ptr<const Contract> contract) {
    std::string key(contract->name());
    contracts_[key] = std::move(contract);
}

const Contract* ContractRegistry::find(std::string_view name) const {
    auto it = contracts_.find(name);
    return it == contracts_.end() ? nullptr : it->second.get();
}

std::vector<std::string> ContractRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, c] : contracts_) out.push_back(name);
    return out;
}

std::shared_ptr<const ContractRegistry> standard_registry() {
    auto registry = std::make_shared<ContractRegistry>();
    registry->add(std::make_shared<DigitalTwinContract>());
    registry->add(std::make_shared<BuildingAutomationConfig>());
    registry->add(std::make_shared<MultiWordConsumer>());
    registry->add(std::make_shared<LinkToken>());
    registry->add(std::make_shared<AutomationRegistry>());
    return registry;
}

std::string deployed_key(std::string_view contract) {
    return "deployed/" + std::string(contract);
}

ExecutionResult execute(const ContractRegistry& registry, const WorldState& state, const Invocation& invocation,
                        const ExecEnv& env) {
    const Contract* contract = registry.find(invocation.contract);
    if (!contract) {
        throw ContractError(ContractError::Kind::UnknownContract, "unknown contract " + invocation.contract);
    }
    ExecutionContext ctx(state, invocation, env);
    const std::string marker = deployed_key(invocation.contract);
    if (invocation.method == kConstructor) {
        if (ctx.get(marker)) {
            throw ContractError(ContractError::Kind::AlreadyDeployed, invocation.contract + " is already deployed");
        }
        ctx.put(marker, invocation.submitter);
    } else if (!ctx.peek(marker)) {
        throw ContractError(ContractError::Kind::UnknownContract, invocation.contract + " is not deployed");
    }
    Value result = contract->invoke(ctx, invocation.method);
    return std::move(ctx).finish(std::move(result));
}

bool is_read_only(const ContractRegistry& registry, const Invocation& invocation) {
    const Contract* contract = registry.find(invocation.contract);
    return contract && invocation.method != kConstructor && contract->is_read_only(invocation.method);
}

} // namespace twin::contracts
