#include "ipts/sip/method.hpp"

namespace ipts::sip {

namespace {
const char* kind_token(SipMethod::Kind k) {
    switch (k) {
        case SipMethod::Invite: return "INVITE";
        case SipMethod::Ack: return "ACK";
        case SipMethod::Options: return "OPTIONS";
        case SipMethod::Bye: return "BYE";
        case SipMethod::Cancel: return "CANCEL";
        case SipMethod::Register: return "REGISTER";
        default: return "";
    }
}
}  // namespace

SipMethod::SipMethod(Kind k) : kind_(k), token_(kind_token(k)) {}

SipMethod SipMethod::extension(std::string token) {
    SipMethod m;
    m.kind_ = Extension;
    m.token_ = std::move(token);
    return m;
}

SipMethod SipMethod::from_token(std::string_view token) {
    // Case-sensitive: "invite" is an extension token, not INVITE.
    if (token == "INVITE") return SipMethod(Invite);
    if (token == "ACK") return SipMethod(Ack);
    if (token == "OPTIONS") return SipMethod(Options);
    if (token == "BYE") return SipMethod(Bye);
    if (token == "CANCEL") return SipMethod(Cancel);
    if (token == "REGISTER") return SipMethod(Register);
    return extension(std::string(token));
}

}  // namespace ipts::sip
