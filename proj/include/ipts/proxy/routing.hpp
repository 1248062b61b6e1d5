#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ipts/proxy/config.hpp"
#include "ipts/reg/store.hpp"
#include "ipts/sip/message.hpp"
#include "ipts/sip/status.hpp"

namespace ipts::proxy {

struct RouteInternal {
    std::vector<reg::Binding> contacts;  // never empty
};

struct RouteExternal {
    std::string trunk_digits;  // external prefix already stripped
};

enum class FeatureKind { Moh, Voicemail, Conference, Ivr };

struct RouteFeature {
    FeatureKind kind;
    // Conference: the room number as dialed. Voicemail: the mailbox extension.
    std::string arg;
};

struct RouteReject {
    sip::StatusCode status;
};

using RoutingDecision = std::variant<RouteInternal, RouteExternal, RouteFeature, RouteReject>;

const char* to_string(FeatureKind k);

// Pre-routing screen. Returns the reject code, or nullopt when the request
// may proceed. wire_size is the on-the-wire byte count, which can exceed the
// re-serialized size for messages we would normalise.
std::optional<sip::StatusCode> sanity_check(const sip::SipRequest& req, size_t wire_size,
                                            const ProxyConfig& cfg);

// Decides what to do with dialed digits on behalf of caller. Total: every
// input yields exactly one decision. now_s filters expired bindings.
RoutingDecision route(const std::string& dialed, const reg::Subscriber& caller,
                      const reg::LocationStore& store, const ProxyConfig& cfg, int64_t now_s);

// Response forwarded upstream once every fork branch has failed: any 6xx
// wins outright, otherwise the numerically lowest final code.
sip::StatusCode best_final_response(const std::vector<sip::StatusCode>& finals);

sip::SipUri aor_uri(const std::string& extension, const std::string& realm);

}  // namespace ipts::proxy
