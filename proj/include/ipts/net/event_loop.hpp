#pragma once

#include <functional>
#include <map>

#include "ipts/net/clock.hpp"
#include "ipts/net/timer_queue.hpp"

namespace ipts::net {

// Single-threaded poll loop. All state mutation in a daemon happens from
// callbacks dispatched here, which is what serializes the transaction table,
// the location store and every call state machine.
class EventLoop {
public:
    explicit EventLoop(const Clock& clock) : clock_(clock), timers_(clock) {}

    void add_fd(int fd, std::function<void()> on_readable);
    void remove_fd(int fd);

    TimerQueue& timers() { return timers_; }
    const Clock& clock() const { return clock_; }

    TimerQueue::TimerId add_timer(int64_t delay_ms, std::function<void()> fn) {
        return timers_.add(delay_ms, std::move(fn));
    }
    void cancel_timer(TimerQueue::TimerId id) { timers_.cancel(id); }

    // Polls fds and fires timers until stop() is called.
    void run();
    // One poll iteration with an upper wait bound; returns false if stopped.
    bool run_once(int max_wait_ms);
    void run_for(int64_t ms);
    void stop() { stopped_ = true; }

private:
    const Clock& clock_;
    TimerQueue timers_;
    std::map<int, std::function<void()>> fds_;
    bool stopped_ = false;
};

}  // namespace ipts::net
