#pragma once

#include <atomic>
#include <chrono>

#include "twin/ledger/types.hpp"

namespace twin::consensus {

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimestampMs now_ms() const = 0;
};

/// Manually driven clock for deterministic runs.
class VirtualClock final : public Clock {
public:
    static constexpr TimestampMs kDefaultEpoch = 1'735'689'600'000;  // 2025-01-01T00:00:00Z

    explicit VirtualClock(TimestampMs start = kDefaultEpoch) : now_(start) {}

    TimestampMs now_ms() const override { return now_.load(); }
    void set(TimestampMs t) { now_.store(t); }
    void advance(TimestampMs dt) { now_.fetch_add(dt); }

private:
    std::atomic<TimestampMs> now_;
};

/// Wall-clock epoch at construction plus monotonic elapsed time, so readings
/// never go backwards even if the system clock is adjusted.
class SystemClock final : public Clock {
public:
    SystemClock();
    TimestampMs now_ms() const override;

private:
    TimestampMs wall_start_;
    std::chrono::steady_clock::time_point steady_start_;
};

} // namespace twin::consensus
