#include "ipts/net/timer_queue.hpp"

#include <vector>

namespace ipts::net {

TimerQueue::TimerId TimerQueue::add(int64_t delay_ms, std::function<void()> fn) {
    TimerId id = next_id_++;
    int64_t deadline = clock_.now_ms() + (delay_ms < 0 ? 0 : delay_ms);
    by_deadline_.emplace(deadline, std::make_pair(id, std::move(fn)));
    deadline_of_[id] = deadline;
    return id;
}

void TimerQueue::cancel(TimerId id) {
    auto it = deadline_of_.find(id);
    if (it == deadline_of_.end()) return;
    auto range = by_deadline_.equal_range(it->second);
    for (auto e = range.first; e != range.second; ++e) {
        if (e->second.first == id) {
            by_deadline_.erase(e);
            break;
        }
    }
    deadline_of_.erase(it);
}

std::optional<int64_t> TimerQueue::next_deadline_ms() const {
    if (by_deadline_.empty()) return std::nullopt;
    return by_deadline_.begin()->first;
}

int TimerQueue::fire_due() {
    int64_t now = clock_.now_ms();
    // Collect first so callbacks may add/cancel timers freely.
    std::vector<std::function<void()>> due;
    while (!by_deadline_.empty() && by_deadline_.begin()->first <= now) {
        auto it = by_deadline_.begin();
        deadline_of_.erase(it->second.first);
        due.push_back(std::move(it->second.second));
        by_deadline_.erase(it);
    }
    for (auto& fn : due) fn();
    return static_cast<int>(due.size());
}

}  // namespace ipts::net
