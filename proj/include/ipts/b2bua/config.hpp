#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ipts/b2bua/dialplan.hpp"
#include "ipts/net/addr.hpp"

namespace ipts::b2bua {

struct TrunkProfile {
    net::NetAddr provider_addr{"127.0.0.1", 5090};
    std::string username;
    std::string password;
    std::string from_domain;
};

struct IvrMenu {
    std::string greeting_file;
    std::string invalid_file;
    int timeout_s = 5;
    std::map<char, std::string> digit_map;  // '2' -> "2002"
};

struct B2buaConfig {
    std::string listen_host = "127.0.0.1";
    uint16_t listen_port = 5080;
    std::string realm = "pbx";
    net::NetAddr proxy_addr{"127.0.0.1", 5060};  // where re-originated calls go

    std::string media_host = "127.0.0.1";
    uint16_t media_port_lo = 16384;
    uint16_t media_port_hi = 32767;

    std::string dialplan_path;  // empty keeps the built-in rules
    std::vector<DialplanRule> dialplan = default_dialplan();
    std::map<std::string, TrunkProfile> trunks;

    std::string vm_dir = "vm";
    int vm_max_s = 120;
    std::string vm_greeting_file;

    std::string moh_file;  // fallback is a generated tone

    IvrMenu ivr;

    int conference_cap = 8;

    net::NetAddr listen_addr() const { return {listen_host, listen_port}; }
};

B2buaConfig parse_b2bua_config(const std::string& text, const std::string& origin);
B2buaConfig load_b2bua_config(const std::string& path);

}  // namespace ipts::b2bua
