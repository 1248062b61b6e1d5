#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

#include "ipts/net/clock.hpp"

namespace ipts::net {

// Deadline-ordered one-shot timers. Pure data structure driven by whoever owns
// the clock: the event loop in daemons, the test directly in unit tests.
class TimerQueue {
public:
    using TimerId = uint64_t;

    explicit TimerQueue(const Clock& clock) : clock_(clock) {}

    TimerId add(int64_t delay_ms, std::function<void()> fn);
    void cancel(TimerId id);
    std::optional<int64_t> next_deadline_ms() const;
    // Runs every timer due at or before now. Returns number fired.
    int fire_due();
    size_t pending() const { return by_deadline_.size(); }
    const Clock& clock() const { return clock_; }

private:
    const Clock& clock_;
    TimerId next_id_ = 1;
    std::multimap<int64_t, std::pair<TimerId, std::function<void()>>> by_deadline_;
    std::map<TimerId, int64_t> deadline_of_;
};

}  // namespace ipts::net
