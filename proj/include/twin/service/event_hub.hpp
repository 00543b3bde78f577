#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <vector>

#include "twin/ledger/types.hpp"

namespace twin::service {

struct HubEvent {
    std::uint64_t seq = 0;
    Value data;
};

/// Ordered fan-out buffer for the event stream. Sequence numbers start at 1
/// and follow publish order, so a client can resume with Last-Event-ID.
class EventHub {
public:
    explicit EventHub(std::size_t keep = 10'000) : keep_(keep) {}

    std::uint64_t publish(Value data);
    /// Events with seq > after still retained, waiting up to `wait` for one.
    std::vector<HubEvent> since(std::uint64_t after, std::chrono::milliseconds wait = std::chrono::milliseconds(0));
    std::uint64_t last_seq() const;
    /// Wakes every waiter; later waits return immediately.
    void close();
    bool closed() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<HubEvent> events_;
    std::size_t keep_;
    std::uint64_t next_ = 1;
    bool closed_ = false;
};

} // namespace twin::service
