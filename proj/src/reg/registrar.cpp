#include "ipts/reg/registrar.hpp"

#include "ipts/sip/ids.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::reg {

using sip::SipRequest;
using sip::SipResponse;
using sip::StatusCode;

Registrar::Registrar(LocationStore& store, std::string realm, const net::Clock& clock)
    : store_(store), realm_(std::move(realm)), clock_(clock) {}

int64_t Registrar::now_s() const { return clock_.now_ms() / 1000; }

sip::SipUri Registrar::aor_of(const std::string& extension) const {
    sip::SipUri aor;
    aor.user = extension;
    aor.host = realm_;
    return aor;
}

std::string Registrar::fresh_nonce() {
    std::string nonce = sip::gen_nonce();
    nonces_[nonce] = NonceState{now_s(), false};
    return nonce;
}

void Registrar::prune_nonces(int64_t now) {
    for (auto it = nonces_.begin(); it != nonces_.end();) {
        if (now - it->second.issued_s > nonce_validity_s * 10)
            it = nonces_.erase(it);
        else
            ++it;
    }
}

sip::SipResponse Registrar::challenge(const SipRequest& req, bool proxy_flavor, bool stale) {
    auto resp = sip::build_response(req, StatusCode(proxy_flavor ? 407 : 401));
    sip::DigestChallenge ch;
    ch.realm = realm_;
    ch.nonce = fresh_nonce();
    ch.stale = stale;
    resp.set_header(proxy_flavor ? "Proxy-Authenticate" : "WWW-Authenticate",
                    ch.to_header_value());
    return resp;
}

AuthResult Registrar::authenticate(const SipRequest& req, bool proxy_flavor) {
    prune_nonces(now_s());
    auto header = req.header(proxy_flavor ? "Proxy-Authorization" : "Authorization");
    if (!header) return AuthResult::NoCredentials;
    auto creds = sip::DigestCredentials::parse(*header);
    if (!creds) return AuthResult::NoCredentials;

    const Subscriber* sub = store_.find_subscriber(creds->username);
    if (!sub) return AuthResult::UnknownUser;

    std::string expected =
        sip::digest_response(sub->credential, creds->nonce, req.method.token(), creds->uri);
    if (expected != creds->response) return AuthResult::BadCredentials;

    // password held up; now vet the nonce
    auto it = nonces_.find(creds->nonce);
    if (it == nonces_.end()) return AuthResult::StaleNonce;
    if (it->second.used) return AuthResult::StaleNonce;
    if (now_s() - it->second.issued_s > nonce_validity_s) return AuthResult::StaleNonce;
    it->second.used = true;
    return AuthResult::Ok;
}

SipResponse Registrar::handle_register(const SipRequest& req) {
    auto to_uri = sip::uri_of(req.to_value());
    if (!to_uri || to_uri->user.empty() || !util::all_digits(to_uri->user))
        return sip::build_response(req, StatusCode(404));
    const std::string& extension = to_uri->user;
    if (!store_.find_subscriber(extension)) return sip::build_response(req, StatusCode(404));

    switch (authenticate(req, false)) {
        case AuthResult::Ok:
            break;
        case AuthResult::NoCredentials:
        case AuthResult::UnknownUser:
        case AuthResult::BadCredentials:
            return challenge(req, false, false);
        case AuthResult::StaleNonce:
            return challenge(req, false, true);
    }

    sip::SipUri aor = aor_of(extension);
    int64_t now = now_s();

    auto contact_header = req.header("Contact");
    if (!contact_header) {
        // query-style REGISTER: report current bindings
        auto resp = sip::build_response(req, StatusCode(200));
        for (const auto& b : store_.lookup(aor, now))
            resp.add_header("Contact", "<" + b.contact.to_string() + ">;expires=" +
                                           std::to_string(b.expires_at - now));
        return resp;
    }

    auto contact_uri = sip::uri_of(*contact_header);
    if (!contact_uri) return sip::build_response(req, StatusCode(400));

    int64_t expires = default_expires_s;
    if (auto param = sip::header_param(*contact_header, "expires")) {
        auto v = util::parse_int<int64_t>(*param);
        if (!v) return sip::build_response(req, StatusCode(400));
        expires = *v;
    } else if (auto h = req.header("Expires")) {
        auto v = util::parse_int<int64_t>(*h);
        if (!v) return sip::build_response(req, StatusCode(400));
        expires = *v;
    }

    if (expires == 0) {
        store_.remove_binding(aor, *contact_uri);
        return sip::build_response(req, StatusCode(200));
    }
    if (expires < min_expires_s) {
        auto resp = sip::build_response(req, StatusCode(423));
        resp.set_header("Min-Expires", std::to_string(min_expires_s));
        return resp;
    }

    Binding b;
    b.aor = aor;
    b.contact = *contact_uri;
    b.registered_at = now;
    b.expires_at = now + expires;
    store_.add_binding(b);

    auto resp = sip::build_response(req, StatusCode(200));
    for (const auto& active : store_.lookup(aor, now))
        resp.add_header("Contact", "<" + active.contact.to_string() + ">;expires=" +
                                       std::to_string(active.expires_at - now));
    return resp;
}

}  // namespace ipts::reg
