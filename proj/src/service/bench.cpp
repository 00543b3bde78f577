#include "twin/service/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace twin::service {

using consensus::BackendKind;
using consensus::TxStatus;

namespace {

double round_to(double v, int places) {
    const double scale = std::pow(10.0, places);
    return std::round(v * scale) / scale;
}

std::string fixed(double v, int places) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(places) << v;
    return out.str();
}

} // namespace

void BenchWorkload::validate() const {
    if (!(send_rate > 0.0)) throw BenchError(BenchError::Kind::InvalidWorkload, "send_rate must be positive");
    if (!(duration_s > 0.0)) throw BenchError(BenchError::Kind::InvalidWorkload, "duration must be positive");
    if (workers < 1) throw BenchError(BenchError::Kind::InvalidWorkload, "workers must be at least 1");
    if (method.empty() || contract.empty()) throw BenchError(BenchError::Kind::InvalidWorkload, "method required");
    if (total() == 0) throw BenchError(BenchError::Kind::InvalidWorkload, "workload submits nothing");
}

std::size_t BenchWorkload::total() const {
    return static_cast<std::size_t>(std::llround(send_rate * duration_s));
}

BenchWorkload BenchWorkload::from_json(const Value& json) {
    BenchWorkload w;
    if (!json.is_object()) throw BenchError(BenchError::Kind::InvalidWorkload, "workload must be an object");
    w.name = json.value("name", w.name);
    w.method = json.value("method", w.method);
    w.contract = json.value("contract", w.method == "transfer" ? std::string("LinkToken") : w.contract);
    if (json.contains("args")) w.args = json.at("args");
    w.send_rate = json.value("send_rate", w.send_rate);
    w.duration_s = json.value("duration", w.duration_s);
    w.workers = json.value("workers", w.workers);
    w.submitter_prefix = json.value("submitter_prefix", w.submitter_prefix);
    if (json.contains("backend")) {
        const auto b = json.at("backend").get<std::string>();
        if (b == "permissioned") {
            w.backend = BackendKind::Permissioned;
        } else if (b == "public") {
            w.backend = BackendKind::Public;
        } else {
            throw BenchError(BenchError::Kind::InvalidWorkload, "unknown backend " + b);
        }
    }
    w.validate();
    return w;
}

Value BenchWorkload::to_json() const {
    return Value{{"args", args},
                 {"backend", consensus::to_string(backend)},
                 {"contract", contract},
                 {"duration", duration_s},
                 {"method", method},
                 {"name", name},
                 {"send_rate", send_rate},
                 {"submitter_prefix", submitter_prefix},
                 {"workers", workers}};
}

Value BenchReport::to_json() const {
    return Value{{"avg_latency_s", avg_latency_s}, {"fail", fail},
                 {"max_latency_s", max_latency_s}, {"min_latency_s", min_latency_s},
                 {"name", name},                   {"send_rate_tps", send_rate_tps},
                 {"succ", succ},                   {"throughput_tps", throughput_tps}};
}

BenchReport BenchReport::from_json(const Value& json) {
    BenchReport r;
    r.name = json.at("name").get<std::string>();
    r.succ = json.at("succ").get<std::int64_t>();
    r.fail = json.at("fail").get<std::int64_t>();
    r.send_rate_tps = json.at("send_rate_tps").get<double>();
    r.max_latency_s = json.at("max_latency_s").get<double>();
    r.min_latency_s = json.at("min_latency_s").get<double>();
    r.avg_latency_s = json.at("avg_latency_s").get<double>();
    r.throughput_tps = json.at("throughput_tps").get<double>();
    return r;
}

BenchReport compute_metrics(const std::string& name, const std::vector<TxRecord>& records) {
    if (records.empty()) throw BenchError(BenchError::Kind::EmptyRecords, "no records");
    std::int64_t first_submit = records.front().submit_us;
    std::int64_t last_submit = first_submit;
    std::int64_t last_complete = records.front().complete_us;
    std::int64_t min_lat = 0, max_lat = 0, sum_lat = 0;
    BenchReport r;
    r.name = name;
    for (const auto& rec : records) {
        first_submit = std::min(first_submit, rec.submit_us);
        last_submit = std::max(last_submit, rec.submit_us);
        last_complete = std::max(last_complete, rec.complete_us);
        if (!rec.ok) {
            ++r.fail;
            continue;
        }
        const std::int64_t lat = rec.complete_us - rec.submit_us;
        min_lat = r.succ == 0 ? lat : std::min(min_lat, lat);
        max_lat = r.succ == 0 ? lat : std::max(max_lat, lat);
        sum_lat += lat;
        ++r.succ;
    }
    const std::int64_t window = last_complete - first_submit;
    if (window <= 0) throw BenchError(BenchError::Kind::ZeroWindow, "completion window has zero width");
    const std::int64_t send_window = last_submit > first_submit ? last_submit - first_submit : window;
    const auto total = static_cast<double>(records.size());
    r.send_rate_tps = round_to(total / (static_cast<double>(send_window) / 1e6), 1);
    r.throughput_tps = round_to(static_cast<double>(r.succ) / (static_cast<double>(window) / 1e6), 1);
    if (r.succ > 0) {
        r.min_latency_s = round_to(static_cast<double>(min_lat) / 1e6, 2);
        r.max_latency_s = round_to(static_cast<double>(max_lat) / 1e6, 2);
        r.avg_latency_s = round_to(static_cast<double>(sum_lat) / static_cast<double>(r.succ) / 1e6, 2);
    }
    return r;
}

std::string format_table(const std::vector<BenchReport>& reports) {
    const std::vector<std::string> heads{"Name",           "Succ",           "Fail",
                                         "Send Rate (TPS)", "Max Latency (s)", "Min Latency (s)",
                                         "Avg Latency (s)", "Throughput (TPS)"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        rows.push_back({r.name, std::to_string(r.succ), std::to_string(r.fail), fixed(r.send_rate_tps, 1),
                        fixed(r.max_latency_s, 2), fixed(r.min_latency_s, 2), fixed(r.avg_latency_s, 2),
                        fixed(r.throughput_tps, 1)});
    }
    std::vector<std::size_t> width(heads.size());
    for (std::size_t i = 0; i < heads.size(); ++i) {
        width[i] = heads[i].size();
        for (const auto& row : rows) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream out;
    auto rule = [&] {
        out << '+';
        for (auto w : width) out << std::string(w + 2, '-') << '+';
        out << '\n';
    };
    auto line = [&](const std::vector<std::string>& cells) {
        out << '|';
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << ' ' << cells[i] << std::string(width[i] - cells[i].size(), ' ') << " |";
        }
        out << '\n';
    };
    rule();
    line(heads);
    rule();
    for (const auto& row : rows) line(row);
    rule();
    return out.str();
}

void write_records(const std::filesystem::path& path, const std::vector<TxRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    out << "submit_us,complete_us,ok\n";
    for (const auto& r : records) out << r.submit_us << ',' << r.complete_us << ',' << (r.ok ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<TxRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    std::vector<TxRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TxRecord r;
        int ok = 0;
        if (std::sscanf(line.c_str(), "%ld,%ld,%d", &r.submit_us, &r.complete_us, &ok) != 3) {
            throw std::runtime_error("malformed record line: " + line);
        }
        r.ok = ok != 0;
        out.push_back(r);
    }
    return out;
}

void write_report_files(const std::filesystem::path& dir, const BenchResult& result) {
    std::filesystem::create_directories(dir);
    const std::string base = result.report.name;
    std::ofstream(dir / (base + ".report.txt")) << format_table({result.report});
    std::ofstream(dir / (base + ".report.json")) << result.report.to_json().dump(2) << '\n';
    write_records(dir / (base + ".records.csv"), result.records);
}

namespace {

struct Outstanding {
    std::mutex mutex;
    std::map<std::string, std::size_t> ids;  // receipt id -> record index
};

// Settles outstanding receipts. `completion_us` maps a settled receipt to its
// completion time.
template <typename CompletionFn>
void sweep(Outstanding& out, const consensus::LedgerBackend& backend, std::vector<TxRecord>& records,
           CompletionFn completion_us) {
    std::lock_guard lock(out.mutex);
    for (auto it = out.ids.begin(); it != out.ids.end();) {
        auto receipt = backend.receipt(it->first);
        if (!receipt || receipt->status == TxStatus::Pending) {
            ++it;
            continue;
        }
        auto& rec = records[it->second];
        rec.complete_us = std::max(rec.submit_us, completion_us(*receipt));
        rec.ok = receipt->status == TxStatus::Committed && receipt->code == ledger::ValidationCode::Valid;
        it = out.ids.erase(it);
    }
}

consensus::Invocation invocation_for(const BenchWorkload& w, std::size_t k) {
    return {w.contract, w.method, w.args, w.submitter_prefix + std::to_string(k % static_cast<std::size_t>(w.workers))};
}

BenchResult run_virtual(const BenchWorkload& w, consensus::LedgerBackend& backend, consensus::VirtualClock& clock,
                        bool read_only) {
    const std::size_t total = w.total();
    std::vector<TxRecord> records(total);
    Outstanding outstanding;
    const std::int64_t base_us = clock.now_ms() * 1000;
    auto block_time_us = [&](const consensus::SubmitReceipt& r) {
        if (r.height) {
            if (auto b = backend.block(*r.height)) return b->header.timestamp * 1000;
        }
        return clock.now_ms() * 1000;
    };
    for (std::size_t k = 0; k < total; ++k) {
        const std::int64_t at_us =
            base_us + static_cast<std::int64_t>(std::llround(static_cast<double>(k) * 1e6 / w.send_rate));
        if (at_us / 1000 > clock.now_ms()) {
            clock.set(at_us / 1000);
            backend.advance(clock.now_ms());
            sweep(outstanding, backend, records, block_time_us);
        }
        auto& rec = records[k];
        rec.submit_us = at_us;
        rec.complete_us = at_us;
        const auto inv = invocation_for(w, k);
        try {
            if (read_only) {
                backend.query(inv);
                rec.ok = true;
            } else {
                auto receipt = backend.submit(inv);
                std::lock_guard lock(outstanding.mutex);
                outstanding.ids.emplace(receipt.id, k);
            }
        } catch (const std::exception&) {
            rec.ok = false;
        }
    }
    const TimestampMs drain_until = clock.now_ms() + 600'000;
    while (true) {
        {
            std::lock_guard lock(outstanding.mutex);
            if (outstanding.ids.empty()) break;
        }
        if (clock.now_ms() >= drain_until) break;
        clock.advance(10);
        backend.advance(clock.now_ms());
        sweep(outstanding, backend, records, block_time_us);
    }
    for (const auto& [id, index] : outstanding.ids) records[index].complete_us = clock.now_ms() * 1000;
    return {compute_metrics(w.name, records), std::move(records)};
}

BenchResult run_real(const BenchWorkload& w, consensus::LedgerBackend& backend, consensus::VirtualClock* clock,
                     bool read_only) {
    using steady = std::chrono::steady_clock;
    const std::size_t total = w.total();
    std::vector<TxRecord> records(total);
    Outstanding outstanding;
    const auto t0 = steady::now() + std::chrono::milliseconds(20);
    auto now_us = [&] {
        return std::chrono::duration_cast<std::chrono::microseconds>(steady::now() - t0).count();
    };

    const TimestampMs clock_start = clock ? clock->now_ms() : 0;
    std::atomic<bool> done{false};
    std::thread driver;
    if (!read_only) {
        driver = std::thread([&] {
            while (!done.load()) {
                if (clock) clock->set(std::max(clock->now_ms(), clock_start + now_us() / 1000));
                backend.advance(backend.clock()->now_ms());
                sweep(outstanding, backend, records, [&](const consensus::SubmitReceipt&) { return now_us(); });
                std::this_thread::sleep_for(std::chrono::milliseconds(2));
            }
        });
    }

    std::vector<std::thread> workers;
    for (int id = 0; id < w.workers; ++id) {
        workers.emplace_back([&, id] {
            for (std::size_t k = static_cast<std::size_t>(id); k < total; k += static_cast<std::size_t>(w.workers)) {
                const auto due = t0 + std::chrono::microseconds(
                                          static_cast<std::int64_t>(std::llround(static_cast<double>(k) * 1e6 / w.send_rate)));
                std::this_thread::sleep_until(due);
                auto& rec = records[k];
                const auto inv = invocation_for(w, k);
                try {
                    if (read_only) {
                        rec.submit_us = now_us();
                        backend.query(inv);
                        rec.complete_us = now_us();
                        rec.ok = true;
                    } else {
                        std::lock_guard lock(outstanding.mutex);
                        rec.submit_us = now_us();
                        auto receipt = backend.submit(inv);
                        outstanding.ids.emplace(receipt.id, k);
                    }
                } catch (const std::exception&) {
                    rec.complete_us = now_us();
                    rec.ok = false;
                }
            }
        });
    }
    for (auto& t : workers) t.join();

    if (!read_only) {
        const auto deadline = steady::now() + std::chrono::seconds(120);
        while (steady::now() < deadline) {
            {
                std::lock_guard lock(outstanding.mutex);
                if (outstanding.ids.empty()) break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        done.store(true);
        driver.join();
        for (const auto& [id, index] : outstanding.ids) records[index].complete_us = now_us();
    }
    return {compute_metrics(w.name, records), std::move(records)};
}

} // namespace

BenchResult run_benchmark(const BenchWorkload& workload, consensus::LedgerBackend& backend, BenchClock mode,
                          consensus::VirtualClock* clock) {
    workload.validate();
    const bool read_only =
        contracts::is_read_only(backend.registry(), {workload.contract, workload.method, workload.args, "bench"});
    if (mode == BenchClock::Virtual) {
        if (!clock) throw BenchError(BenchError::Kind::InvalidWorkload, "virtual benchmark needs a virtual clock");
        return run_virtual(workload, backend, *clock, read_only);
    }
    return run_real(workload, backend, clock, read_only);
}

} // namespace twin::service
