#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twin/ledger/world_state.hpp"

namespace twin::contracts {

using ledger::EventRecord;
using ledger::ReadEntry;
using ledger::WorldState;
using ledger::WriteEntry;

/// A call to a contract method on behalf of `submitter`.
struct Invocation {
    std::string contract;
    std::string method;
    Value args = Value::array();
    std::string submitter;

    Value to_json() const;
};

/// Block context visible to contract code. `fees_enabled` is the switch
/// between the permissioned (fee-free) and public (LINK-metered) deployments.
struct ExecEnv {
    TimestampMs timestamp = 0;
    std::int64_t height = 0;
    bool fees_enabled = false;
};

class ContractError : public std::runtime_error {
public:
    enum class Kind {
        UnknownContract,
        UnknownMethod,
        AlreadyDeployed,
        BadArgument,
        NotFound,
        NotAuthorized,
        UnknownThreshold,
        InsufficientFee,
        InsufficientBalance,
        UnknownRequest,
        AlreadyFulfilled,
        NotOracle,
    };

    ContractError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

const char* to_string(ContractError::Kind kind) noexcept;

struct ExecutionResult {
    Value result;
    std::vector<ReadEntry> read_set;
    std::vector<WriteEntry> write_set;
    std::vector<EventRecord> events;
};

/// Simulation context: reads come from a committed snapshot and are recorded
/// with their versions; writes are buffered and never touch the snapshot.
class ExecutionContext {
public:
    ExecutionContext(const WorldState& state, const Invocation& invocation, const ExecEnv& env)
        : state_(state), invocation_(invocation), env_(env) {}

    std::optional<Value> get(const std::string& key);
    /// Reads without recording a read-set entry. Only for keys that never
    /// change once written (deployment markers).
    std::optional<Value> peek(std::string_view key) const;
    void put(const std::string& key, Value value);
    void emit(std::string name, Value payload);

    const std::string& submitter() const noexcept { return invocation_.submitter; }
    const Value& args() const noexcept { return invocation_.args; }
    const ExecEnv& env() const noexcept { return env_; }

    std::size_t arg_count() const;
    std::string arg_string(std::size_t i) const;
    /// Accepts a JSON integer or a string holding a base-10 integer.
    std::int64_t arg_int(std::size_t i) const;

    ExecutionResult finish(Value result) &&;

private:
    const WorldState& state_;
    const Invocation& invocation_;
    ExecEnv env_;
    std::map<std::string, std::uint64_t> reads_;
    std::map<std::string, Value> writes_;
    std::vector<EventRecord> events_;
};

class Contract {
public:
    virtual ~Contract() = default;
    virtual std::string_view name() const = 0;
    virtual Value invoke(ExecutionContext& ctx, std::string_view method) const = 0;
    virtual bool is_read_only(std::string_view method) const = 0;
};

class ContractRegistry {
public:
    void add(std::shared_ptr<const Contract> contract);
    const Contract* find(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::shared_ptr<const Contract>, std::less<>> contracts_;
};

/// Registry holding DigitalTwinContract, BuildingAutomationConfig,
/// MultiWordConsumer, LinkToken and AutomationRegistry.
std::shared_ptr<const ContractRegistry> standard_registry();

/// World-state key marking a contract as instantiated; value is the deployer.
std::string deployed_key(std::string_view contract);

inline constexpr std::string_view kConstructor = "constructor";

/// Runs `invocation` against `state`. "constructor" instantiates the contract;
/// any other method requires a prior instantiation. Throws ContractError.
ExecutionResult execute(const ContractRegistry& registry, const WorldState& state, const Invocation& invocation,
                        const ExecEnv& env);

bool is_read_only(const ContractRegistry& registry, const Invocation& invocation);

} // namespace twin::contracts
