#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "twin/consensus/backend.hpp"

namespace twin::service {

class BenchError : public std::runtime_error {
public:
    enum class Kind { InvalidWorkload, EmptyRecords, ZeroWindow, BackendUnavailable };

    BenchError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Per-transaction timing in integer microseconds on the benchmark's clock.
struct TxRecord {
    std::int64_t submit_us = 0;
    std::int64_t complete_us = 0;
    bool ok = false;

    bool operator==(const TxRecord&) const = default;
};

struct BenchWorkload {
    std::string name = "GetBuildingData";
    std::string contract = "DigitalTwinContract";
    std::string method = "GetBuildingData";
    Value args = Value::array();
    double send_rate = 591.0;
    double duration_s = 30.0;
    int workers = 4;
    consensus::BackendKind backend = consensus::BackendKind::Permissioned;
    /// Submitters are "<submitter_prefix><worker index>".
    std::string submitter_prefix = "bench-";

    /// Throws BenchError(InvalidWorkload).
    void validate() const;
    std::size_t total() const;

    static BenchWorkload from_json(const Value& json);
    Value to_json() const;
};

struct BenchReport {
    std::string name;
    std::int64_t succ = 0;
    std::int64_t fail = 0;
    double send_rate_tps = 0.0;   // 1 dp
    double max_latency_s = 0.0;   // 2 dp
    double min_latency_s = 0.0;   // 2 dp
    double avg_latency_s = 0.0;   // 2 dp
    double throughput_tps = 0.0;  // 1 dp

    Value to_json() const;
    static BenchReport from_json(const Value& json);
    bool operator==(const BenchReport&) const = default;
};

/// send_rate = total / (last_submit - first_submit), falling back to the
/// throughput window when every submission shares one instant;
/// throughput = succ / (last_complete - first_submit); latencies over
/// successful records. Throws BenchError(EmptyRecords | ZeroWindow).
BenchReport compute_metrics(const std::string& name, const std::vector<TxRecord>& records);

/// Caliper-style fixed-width table with the eight standard columns.
std::string format_table(const std::vector<BenchReport>& reports);

void write_records(const std::filesystem::path& path, const std::vector<TxRecord>& records);
std::vector<TxRecord> read_records(const std::filesystem::path& path);

struct BenchResult {
    BenchReport report;
    std::vector<TxRecord> records;
};

enum class BenchClock { Virtual, Real };

/// Open-loop driver: submission k is due at k / send_rate seconds. Read-only
/// methods complete when the query returns; others when their receipt
/// settles. In Virtual mode `clock` is stepped and the backend advanced by
/// this call; in Real mode a helper thread advances the backend and, when
/// given, moves `clock` with monotonic wall time.
BenchResult run_benchmark(const BenchWorkload& workload, consensus::LedgerBackend& backend, BenchClock mode,
                          consensus::VirtualClock* clock = nullptr);

/// Writes <dir>/<name>.report.txt, <name>.report.json and <name>.records.csv.
void write_report_files(const std::filesystem::path& dir, const BenchResult& result);

} // namespace twin::service
