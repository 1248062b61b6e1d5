#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ipts::sip {

// RFC 2617 style digest without qop: response = MD5(HA1:nonce:MD5(method:uri)).
struct DigestChallenge {
    std::string realm;
    std::string nonce;
    bool stale = false;

    std::string to_header_value() const;
    static std::optional<DigestChallenge> parse(std::string_view header_value);
};

struct DigestCredentials {
    std::string username;
    std::string realm;
    std::string nonce;
    std::string uri;
    std::string response;

    std::string to_header_value() const;
    static std::optional<DigestCredentials> parse(std::string_view header_value);
};

// HA1, the stored subscriber credential.
std::string digest_ha1(std::string_view username, std::string_view realm,
                       std::string_view password);

std::string digest_response(std::string_view ha1, std::string_view nonce,
                            std::string_view method, std::string_view uri);

}  // namespace ipts::sip
