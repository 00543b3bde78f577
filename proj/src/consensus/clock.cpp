#include "twin/consensus/clock.hpp"

namespace twin::consensus {

SystemClock::SystemClock()
    : wall_start_(std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count()),
      steady_start_(std::chrono::steady_clock::now()) {}

TimestampMs SystemClock::now_ms() const {
    auto elapsed = std::chrono::steady_clock::now() - steady_start_;
    return wall_start_ + std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
}

} // namespace twin::consensus
