#pragma once

#include <map>
#include <string>

#include "ipts/net/clock.hpp"
#include "ipts/reg/store.hpp"
#include "ipts/sip/digest.hpp"
#include "ipts/sip/message.hpp"

namespace ipts::reg {

enum class AuthResult { Ok, NoCredentials, UnknownUser, BadCredentials, StaleNonce };

// Digest challenge state plus REGISTER processing. The proxy reuses the same
// verifier for INVITE with the 407 header pair.
class Registrar {
public:
    Registrar(LocationStore& store, std::string realm, const net::Clock& clock);

    sip::SipResponse handle_register(const sip::SipRequest& req);

    // proxy_flavor false: 401/WWW-Authenticate/Authorization
    // proxy_flavor true:  407/Proxy-Authenticate/Proxy-Authorization
    AuthResult authenticate(const sip::SipRequest& req, bool proxy_flavor = false);
    sip::SipResponse challenge(const sip::SipRequest& req, bool proxy_flavor, bool stale);

    sip::SipUri aor_of(const std::string& extension) const;
    const std::string& realm() const { return realm_; }

    int64_t nonce_validity_s = 60;
    int64_t default_expires_s = 3600;
    int64_t min_expires_s = 60;

private:
    struct NonceState {
        int64_t issued_s = 0;
        bool used = false;
    };
    std::string fresh_nonce();
    void prune_nonces(int64_t now_s);
    int64_t now_s() const;

    LocationStore& store_;
    std::string realm_;
    const net::Clock& clock_;
    std::map<std::string, NonceState> nonces_;
};

}  // namespace ipts::reg
