#pragma once

#include <cstdint>

namespace ipts::net {

// Millisecond monotonic time source. Components never call the OS clock directly
// so tests can drive them with VirtualClock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual int64_t now_ms() const = 0;
};

class SteadyClock : public Clock {
public:
    int64_t now_ms() const override;
};

class VirtualClock : public Clock {
public:
    explicit VirtualClock(int64_t start_ms = 0) : now_(start_ms) {}
    int64_t now_ms() const override { return now_; }
    void advance(int64_t ms) { now_ += ms; }
    void set(int64_t ms) { now_ = ms; }

private:
    int64_t now_;
};

// Wall-clock unix time in ms (CDRs, binding expiries, voicemail names).
int64_t unix_now_ms();

// Unix time behind the Clock interface, for state shared across processes
// (binding journals, CDRs) where a monotonic base would not line up.
class UnixClock : public Clock {
public:
    int64_t now_ms() const override { return unix_now_ms(); }
};

}  // namespace ipts::net
