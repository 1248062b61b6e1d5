#include "ipts/sip/digest.hpp"

#include <map>

#include "ipts/util/md5.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::sip {

namespace {

// name="value" or name=value pairs separated by commas, after the scheme token.
std::map<std::string, std::string> parse_auth_params(std::string_view text) {
    std::map<std::string, std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
        size_t eq = text.find('=', i);
        if (eq == std::string_view::npos) break;
        std::string key(util::trim(text.substr(i, eq - i)));
        ++eq;
        std::string value;
        if (eq < text.size() && text[eq] == '"') {
            size_t close = text.find('"', eq + 1);
            if (close == std::string_view::npos) break;
            value = std::string(text.substr(eq + 1, close - eq - 1));
            i = close + 1;
        } else {
            size_t comma = text.find(',', eq);
            value = std::string(util::trim(
                text.substr(eq, comma == std::string_view::npos ? comma : comma - eq)));
            i = comma == std::string_view::npos ? text.size() : comma + 1;
        }
        out[util::to_lower(key)] = value;
    }
    return out;
}

std::optional<std::string_view> strip_digest_scheme(std::string_view v) {
    v = util::trim(v);
    if (!v.starts_with("Digest")) return std::nullopt;
    return v.substr(6);
}

}  // namespace

std::string DigestChallenge::to_header_value() const {
    std::string out = "Digest realm=\"" + realm + "\", nonce=\"" + nonce + "\"";
    if (stale) out += ", stale=true";
    return out;
}

std::optional<DigestChallenge> DigestChallenge::parse(std::string_view header_value) {
    auto rest = strip_digest_scheme(header_value);
    if (!rest) return std::nullopt;
    auto params = parse_auth_params(*rest);
    DigestChallenge ch;
    ch.realm = params["realm"];
    ch.nonce = params["nonce"];
    ch.stale = params.count("stale") && params["stale"] == "true";
    if (ch.nonce.empty()) return std::nullopt;
    return ch;
}

std::string DigestCredentials::to_header_value() const {
    return "Digest username=\"" + username + "\", realm=\"" + realm + "\", nonce=\"" + nonce +
           "\", uri=\"" + uri + "\", response=\"" + response + "\"";
}

std::optional<DigestCredentials> DigestCredentials::parse(std::string_view header_value) {
    auto rest = strip_digest_scheme(header_value);
    if (!rest) return std::nullopt;
    auto params = parse_auth_params(*rest);
    DigestCredentials cr;
    cr.username = params["username"];
    cr.realm = params["realm"];
    cr.nonce = params["nonce"];
    cr.uri = params["uri"];
    cr.response = params["response"];
    if (cr.username.empty() || cr.nonce.empty() || cr.response.empty()) return std::nullopt;
    return cr;
}

std::string digest_ha1(std::string_view username, std::string_view realm,
                       std::string_view password) {
    return util::md5_hex(std::string(username) + ":" + std::string(realm) + ":" +
                         std::string(password));
}

std::string digest_response(std::string_view ha1, std::string_view nonce, std::string_view method,
                            std::string_view uri) {
    std::string ha2 = util::md5_hex(std::string(method) + ":" + std::string(uri));
    return util::md5_hex(std::string(ha1) + ":" + std::string(nonce) + ":" + ha2);
}

}  // namespace ipts::sip
