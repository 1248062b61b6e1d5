#include "ipts/sip/uri.hpp"

#include "ipts/util/strings.hpp"

namespace ipts::sip {

std::string SipUri::to_string() const {
    std::string out = scheme + ":";
    if (!user.empty()) out += user + "@";
    out += host;
    if (port) out += ":" + std::to_string(*port);
    for (const auto& [k, v] : params) {
        out += ";" + k;
        if (!v.empty()) out += "=" + v;
    }
    return out;
}

std::optional<std::string> SipUri::param(std::string_view name) const {
    for (const auto& [k, v] : params)
        if (k == name) return v;
    return std::nullopt;
}

SipUri& SipUri::with_param(std::string name, std::string value) {
    params.emplace_back(std::move(name), std::move(value));
    return *this;
}

std::optional<SipUri> SipUri::parse(std::string_view text) {
    SipUri uri;
    size_t colon = text.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    uri.scheme = std::string(text.substr(0, colon));
    if (uri.scheme != "sip") return std::nullopt;  // scheme is case-sensitive
    std::string_view rest = text.substr(colon + 1);

    // Split off ;params first (no params contain '@' or ':' in our subset).
    size_t semi = rest.find(';');
    std::string_view param_part;
    if (semi != std::string_view::npos) {
        param_part = rest.substr(semi + 1);
        rest = rest.substr(0, semi);
    }

    size_t at = rest.find('@');
    if (at != std::string_view::npos) {
        uri.user = std::string(rest.substr(0, at));
        rest = rest.substr(at + 1);
    }
    size_t pcolon = rest.find(':');
    if (pcolon != std::string_view::npos) {
        auto p = util::parse_int<uint16_t>(rest.substr(pcolon + 1));
        if (!p) return std::nullopt;
        uri.port = *p;
        rest = rest.substr(0, pcolon);
    }
    if (rest.empty()) return std::nullopt;  // host required
    uri.host = std::string(rest);

    if (!param_part.empty()) {
        for (const auto& p : util::split(param_part, ';')) {
            if (p.empty()) return std::nullopt;
            size_t eq = p.find('=');
            if (eq == std::string::npos)
                uri.params.emplace_back(p, "");
            else
                uri.params.emplace_back(p.substr(0, eq), p.substr(eq + 1));
        }
    }
    return uri;
}

}  // namespace ipts::sip
