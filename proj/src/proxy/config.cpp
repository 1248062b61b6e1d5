#include "ipts/proxy/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ipts/util/ini.hpp"
#include "ipts/util/pattern.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::proxy {

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

void validate(const ProxyConfig& cfg, const std::string& origin) {
    if (cfg.external_prefix.size() != 1 || !util::all_digits(cfg.external_prefix))
        fail(origin, "external_prefix must be a single digit");
    if (cfg.conference_pattern.find_first_not_of("0123456789Xx.") != std::string::npos)
        fail(origin, "conference_pattern may contain digits, X, and a trailing . only");
    for (const auto* ext : {&cfg.voicemail_ext, &cfg.ivr_ext, &cfg.moh_ext}) {
        if (!util::all_digits(*ext)) fail(origin, "feature extension not numeric: " + *ext);
        if (ext->substr(0, 1) == cfg.external_prefix)
            fail(origin, "feature extension collides with external prefix: " + *ext);
    }
    std::set<std::string> distinct{cfg.voicemail_ext, cfg.ivr_ext, cfg.moh_ext};
    if (distinct.size() != 3) fail(origin, "feature extensions must be pairwise distinct");
    if (cfg.max_forwards_default <= 0) fail(origin, "max_forwards must be positive");
    if (cfg.max_message_bytes < 1024) fail(origin, "max_message_bytes too small");
    if (cfg.no_answer_ms <= 0) fail(origin, "no_answer_ms must be positive");
}

}  // namespace

ProxyConfig parse_proxy_config(const std::string& text, const std::string& origin) {
    const auto ini = util::IniFile::parse_string(text);

    for (const auto& name : ini.section_names())
        if (name != "server" && name != "dialplan" && name != "trunk" && !name.empty())
            fail(origin, "unknown section [" + name + "]");
    check_keys(ini, origin, "server",
               {"host", "port", "realm", "users", "journal", "cdr", "max_forwards",
                "max_message_bytes", "no_answer_ms"});
    check_keys(ini, origin, "dialplan",
               {"external_prefix", "conference_pattern", "voicemail_ext", "ivr_ext", "moh_ext"});
    check_keys(ini, origin, "trunk", {"b2bua", "media"});

    ProxyConfig cfg;
    cfg.listen_host = ini.get_or("server", "host", cfg.listen_host);
    if (auto v = ini.get("server", "port")) cfg.listen_port = parse_port(origin, "port", *v);
    cfg.realm = ini.get_or("server", "realm", cfg.realm);
    cfg.users_path = ini.get_or("server", "users", cfg.users_path);
    cfg.journal_path = ini.get_or("server", "journal", cfg.journal_path);
    cfg.cdr_path = ini.get_or("server", "cdr", cfg.cdr_path);
    cfg.max_forwards_default = ini.get_int("server", "max_forwards", cfg.max_forwards_default);
    cfg.max_message_bytes = static_cast<size_t>(
        ini.get_int("server", "max_message_bytes", static_cast<int>(cfg.max_message_bytes)));
    cfg.no_answer_ms = ini.get_int("server", "no_answer_ms", cfg.no_answer_ms);

    cfg.external_prefix = ini.get_or("dialplan", "external_prefix", cfg.external_prefix);
    cfg.conference_pattern = ini.get_or("dialplan", "conference_pattern", cfg.conference_pattern);
    cfg.voicemail_ext = ini.get_or("dialplan", "voicemail_ext", cfg.voicemail_ext);
    cfg.ivr_ext = ini.get_or("dialplan", "ivr_ext", cfg.ivr_ext);
    cfg.moh_ext = ini.get_or("dialplan", "moh_ext", cfg.moh_ext);

    if (auto v = ini.get("trunk", "b2bua")) cfg.b2bua_addr = parse_addr(origin, "b2bua", *v);
    if (auto v = ini.get("trunk", "media")) cfg.media_addr = parse_addr(origin, "media", *v);

    validate(cfg, origin);
    return cfg;
}

ProxyConfig load_proxy_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_proxy_config(buf.str(), path);
}

}  // namespace ipts::proxy
