#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ipts::sip {

// sip:user@host:port;param=value;...  Scheme is case-sensitive "sip".
struct SipUri {
    std::string scheme = "sip";
    std::string user;  // may be empty
    std::string host;
    std::optional<uint16_t> port;  // absent means the SIP default
    std::vector<std::pair<std::string, std::string>> params;  // ordered, value may be empty

    uint16_t port_or_default() const { return port.value_or(5060); }
    std::string to_string() const;
    std::optional<std::string> param(std::string_view name) const;
    SipUri& with_param(std::string name, std::string value);

    bool operator==(const SipUri&) const = default;

    static std::optional<SipUri> parse(std::string_view text);
};

}  // namespace ipts::sip
