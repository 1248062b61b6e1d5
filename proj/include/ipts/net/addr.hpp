#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace ipts::net {

// IPv4 host:port pair. Hosts are dotted quads or names resolvable via /etc/hosts;
// everything in this system runs on loopback.
struct NetAddr {
    std::string host;
    uint16_t port = 0;

    bool operator==(const NetAddr&) const = default;
    auto operator<=>(const NetAddr&) const = default;
    bool valid() const { return !host.empty() && port != 0; }
    std::string to_string() const { return host + ":" + std::to_string(port); }
    static std::optional<NetAddr> parse(std::string_view text);
};

}  // namespace ipts::net

template <>
struct std::hash<ipts::net::NetAddr> {
    size_t operator()(const ipts::net::NetAddr& a) const noexcept {
        return std::hash<std::string>()(a.host) * 31 + a.port;
    }
};
