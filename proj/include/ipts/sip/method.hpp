#pragma once

#include <string>
#include <string_view>

namespace ipts::sip {

// The six core methods plus an escape for tokens we forward but do not act on.
// Method tokens are case-sensitive uppercase on the wire.
class SipMethod {
public:
    enum Kind { Invite, Ack, Options, Bye, Cancel, Register, Extension };

    SipMethod() : kind_(Extension) {}
    SipMethod(Kind k);  // not explicit: Kind literals convert freely
    static SipMethod extension(std::string token);
    static SipMethod from_token(std::string_view token);

    Kind kind() const { return kind_; }
    const std::string& token() const { return token_; }
    bool is(Kind k) const { return kind_ == k; }

    bool operator==(const SipMethod& o) const { return token_ == o.token_; }
    bool operator!=(const SipMethod& o) const { return !(*this == o); }

private:
    Kind kind_;
    std::string token_;
};

}  // namespace ipts::sip
