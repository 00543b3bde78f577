#include "twin/service/event_hub.hpp"

namespace twin::service {

std::uint64_t EventHub::publish(Value data) {
    std::uint64_t seq = 0;
    {
        std::lock_guard lock(mutex_);
        seq = next_++;
        events_.push_back({seq, std::move(data)});
        while (events_.size() > keep_) events_.pop_front();
    }
    cv_.notify_all();
    return seq;
}

std::vector<HubEvent> EventHub::since(std::uint64_t after, std::chrono::milliseconds wait) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, wait, [&] { return closed_ || next_ - 1 > after; });
    std::vector<HubEvent> out;
    for (const auto& e : events_) {
        if (e.seq > after) out.push_back(e);
    }
    return out;
}

std::uint64_t EventHub::last_seq() const {
    std::lock_guard lock(mutex_);
    return next_ - 1;
}

void EventHub::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool EventHub::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

} // namespace twin::service
