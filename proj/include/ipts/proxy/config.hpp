#pragma once

#include <cstdint>
#include <string>

#include "ipts/net/addr.hpp"

namespace ipts::proxy {

// Proxy settings, file layout mirrors the struct: [server] for transport and
// storage paths, [dialplan] for number-plan knobs, [trunk] for the b2bua hop.
struct ProxyConfig {
    // [server]
    std::string listen_host = "127.0.0.1";
    uint16_t listen_port = 5060;
    std::string realm = "pbx";
    std::string users_path = "users.csv";
    std::string journal_path = "bindings.journal";
    std::string cdr_path = "cdr.csv";
    int max_forwards_default = 70;
    size_t max_message_bytes = 16 * 1024;
    int no_answer_ms = 20'000;

    // [dialplan]
    std::string external_prefix = "9";
    std::string conference_pattern = "30XX";
    std::string voicemail_ext = "4000";
    std::string ivr_ext = "4010";
    std::string moh_ext = "4020";

    // [trunk]
    net::NetAddr b2bua_addr{"127.0.0.1", 5080};
    net::NetAddr media_addr{"127.0.0.1", 0};

    net::NetAddr listen_addr() const { return {listen_host, listen_port}; }
};

// Both throw std::runtime_error naming the offending key; unknown keys are
// errors so config typos surface at startup instead of silently defaulting.
ProxyConfig load_proxy_config(const std::string& path);
ProxyConfig parse_proxy_config(const std::string& text, const std::string& origin = "config");

}  // namespace ipts::proxy
