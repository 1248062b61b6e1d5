#include "ipts/net/event_loop.hpp"

#include <poll.h>

#include <vector>

namespace ipts::net {

void EventLoop::add_fd(int fd, std::function<void()> on_readable) {
    fds_[fd] = std::move(on_readable);
}

void EventLoop::remove_fd(int fd) { fds_.erase(fd); }

bool EventLoop::run_once(int max_wait_ms) {
    if (stopped_) return false;
    int64_t now = clock_.now_ms();
    int wait = max_wait_ms;
    if (auto dl = timers_.next_deadline_ms()) {
        int64_t until = *dl - now;
        if (until < 0) until = 0;
        if (until < wait) wait = static_cast<int>(until);
    }

    std::vector<struct pollfd> pfds;
    pfds.reserve(fds_.size());
    for (const auto& [fd, _] : fds_) pfds.push_back({fd, POLLIN, 0});

    int n = ::poll(pfds.data(), pfds.size(), wait);
    if (n > 0) {
        for (const auto& p : pfds) {
            if (p.revents & (POLLIN | POLLERR | POLLHUP)) {
                auto it = fds_.find(p.fd);
                if (it != fds_.end()) it->second();  // handler may remove fds
                if (stopped_) return false;
            }
        }
    }
    timers_.fire_due();
    return !stopped_;
}

void EventLoop::run() {
    stopped_ = false;
    while (run_once(250)) {
    }
}

void EventLoop::run_for(int64_t ms) {
    stopped_ = false;
    int64_t deadline = clock_.now_ms() + ms;
    while (!stopped_) {
        int64_t left = deadline - clock_.now_ms();
        if (left <= 0) break;
        run_once(static_cast<int>(left > 250 ? 250 : left));
    }
}

}  // namespace ipts::net
