#include "ipts/b2bua/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ipts/util/ini.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::b2bua {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw std::runtime_error(origin + ": " + what);
}

void check_keys(const util::IniFile& ini, const std::string& origin,
                const std::string& section, const std::set<std::string>& known) {
    for (const auto& [key, _] : ini.entries(section))
        if (!known.count(key)) fail(origin, "unknown key [" + section + "] " + key);
}

uint16_t parse_port(const std::string& origin, const std::string& key, const std::string& text) {
    auto p = util::parse_int<uint32_t>(text);
    if (!p || *p == 0 || *p > 65535) fail(origin, "bad port for " + key + ": " + text);
    return static_cast<uint16_t>(*p);
}

net::NetAddr parse_addr(const std::string& origin, const std::string& key,
                        const std::string& text) {
    auto a = net::NetAddr::parse(text);
    if (!a || !a->valid()) fail(origin, "bad address for " + key + ": " + text);
    return *a;
}

void validate(const B2buaConfig& cfg, const std::string& origin) {
    if (cfg.media_port_lo >= cfg.media_port_hi)
        fail(origin, "media port range is empty");
    if (cfg.vm_max_s <= 0) fail(origin, "voicemail max_s must be positive");
    if (cfg.conference_cap < 1) fail(origin, "conference cap must be at least 1");
    if (cfg.ivr.timeout_s <= 0) fail(origin, "ivr timeout_s must be positive");
    for (const auto& [digit, ext] : cfg.ivr.digit_map) {
        if (digit < '0' || digit > '9')
            fail(origin, std::string("ivr digit key must be 0-9, got: ") + digit);
        if (!util::all_digits(ext)) fail(origin, "ivr target not numeric: " + ext);
    }
    // The built-in plan names a placeholder trunk; only a plan the operator
    // wrote is held to the configured trunk list.
    if (!cfg.dialplan_path.empty())
        for (const auto& rule : cfg.dialplan)
            if (rule.action == DialplanAction::Bridge && !cfg.trunks.count(rule.arg))
                fail(origin, "dialplan references unknown trunk: " + rule.arg);
}

}  // namespace

B2buaConfig parse_b2bua_config(const std::string& text, const std::string& origin) {
    const auto ini = util::IniFile::parse_string(text);

    const std::set<std::string> fixed = {"server", "media",      "dialplan", "voicemail",
                                         "moh",    "conference", "ivr",      ""};
    for (const auto& name : ini.section_names())
        if (!fixed.count(name) && name.rfind("trunk", 0) != 0)
            fail(origin, "unknown section [" + name + "]");

    check_keys(ini, origin, "server", {"listen", "realm", "proxy"});
    check_keys(ini, origin, "media", {"bind", "port_min", "port_max"});
    check_keys(ini, origin, "dialplan", {"file"});
    check_keys(ini, origin, "voicemail", {"dir", "greeting", "max_s"});
    check_keys(ini, origin, "moh", {"file"});
    check_keys(ini, origin, "conference", {"cap"});

    B2buaConfig cfg;
    if (auto v = ini.get("server", "listen")) {
        auto addr = parse_addr(origin, "listen", *v);
        cfg.listen_host = addr.host;
        cfg.listen_port = addr.port;
    }
    cfg.realm = ini.get_or("server", "realm", cfg.realm);
    if (auto v = ini.get("server", "proxy")) cfg.proxy_addr = parse_addr(origin, "proxy", *v);

    cfg.media_host = ini.get_or("media", "bind", cfg.media_host);
    if (auto v = ini.get("media", "port_min"))
        cfg.media_port_lo = parse_port(origin, "port_min", *v);
    if (auto v = ini.get("media", "port_max"))
        cfg.media_port_hi = parse_port(origin, "port_max", *v);

    cfg.dialplan_path = ini.get_or("dialplan", "file", cfg.dialplan_path);
    if (!cfg.dialplan_path.empty()) cfg.dialplan = load_dialplan(cfg.dialplan_path);

    for (const auto& name : ini.section_names()) {
        if (name.rfind("trunk", 0) != 0) continue;
        check_keys(ini, origin, name, {"addr", "username", "password", "from_domain"});
        TrunkProfile trunk;
        if (auto v = ini.get(name, "addr")) trunk.provider_addr = parse_addr(origin, "addr", *v);
        trunk.username = ini.get_or(name, "username", "");
        trunk.password = ini.get_or(name, "password", "");
        trunk.from_domain = ini.get_or(name, "from_domain", cfg.realm);
        cfg.trunks[name] = std::move(trunk);
    }

    cfg.vm_dir = ini.get_or("voicemail", "dir", cfg.vm_dir);
    cfg.vm_greeting_file = ini.get_or("voicemail", "greeting", cfg.vm_greeting_file);
    cfg.vm_max_s = ini.get_int("voicemail", "max_s", cfg.vm_max_s);

    cfg.moh_file = ini.get_or("moh", "file", cfg.moh_file);

    cfg.conference_cap = ini.get_int("conference", "cap", cfg.conference_cap);

    for (const auto& [key, value] : ini.entries("ivr")) {
        if (key == "greeting") {
            cfg.ivr.greeting_file = value;
        } else if (key == "invalid") {
            cfg.ivr.invalid_file = value;
        } else if (key == "timeout_s") {
            auto t = util::parse_int<int>(value);
            if (!t) fail(origin, "bad ivr timeout_s: " + value);
            cfg.ivr.timeout_s = *t;
        } else if (key.rfind("digit.", 0) == 0 && key.size() == 7) {
            cfg.ivr.digit_map[key[6]] = value;
        } else {
            fail(origin, "unknown key [ivr] " + key);
        }
    }

    validate(cfg, origin);
    return cfg;
}

B2buaConfig load_b2bua_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_b2bua_config(buf.str(), path);
}

}  // namespace ipts::b2bua
