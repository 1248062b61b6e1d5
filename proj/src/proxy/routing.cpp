#include "ipts/proxy/routing.hpp"

#include <algorithm>

#include "ipts/util/pattern.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::proxy {

const char* to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::Moh: return "moh";
        case FeatureKind::Voicemail: return "voicemail";
        case FeatureKind::Conference: return "conference";
        case FeatureKind::Ivr: return "ivr";
    }
    return "?";
}

std::optional<sip::StatusCode> sanity_check(const sip::SipRequest& req, size_t wire_size,
                                            const ProxyConfig& cfg) {
    if (wire_size > cfg.max_message_bytes) return sip::StatusCode{413};
    if (sip::missing_mandatory_header(req)) return sip::StatusCode{400};
    auto mf = req.max_forwards();
    if (req.has_header("Max-Forwards") && !mf) return sip::StatusCode{400};
    if (mf && *mf <= 0) return sip::StatusCode{483};
    return std::nullopt;
}

RoutingDecision route(const std::string& dialed, const reg::Subscriber& caller,
                      const reg::LocationStore& store, const ProxyConfig& cfg, int64_t now_s) {
    if (dialed.starts_with(cfg.external_prefix)) {
        if (caller.privilege != reg::Privilege::External)
            return RouteReject{sip::StatusCode{403}};
        std::string stripped = dialed.substr(cfg.external_prefix.size());
        if (!util::all_digits(stripped)) return RouteReject{sip::StatusCode{404}};
        return RouteExternal{std::move(stripped)};
    }
    if (util::digit_pattern_match(dialed, cfg.conference_pattern))
        return RouteFeature{FeatureKind::Conference, dialed};
    if (dialed == cfg.voicemail_ext)
        return RouteFeature{FeatureKind::Voicemail, caller.extension};
    if (dialed == cfg.ivr_ext) return RouteFeature{FeatureKind::Ivr, {}};
    if (dialed == cfg.moh_ext) return RouteFeature{FeatureKind::Moh, {}};
    if (const auto* sub = store.find_subscriber(dialed)) {
        auto contacts = store.lookup(aor_uri(sub->extension, cfg.realm), now_s);
        if (!contacts.empty()) return RouteInternal{std::move(contacts)};
        // Subscriber with no reachable device goes straight to their mailbox.
        return RouteFeature{FeatureKind::Voicemail, sub->extension};
    }
    return RouteReject{sip::StatusCode{404}};
}

sip::StatusCode best_final_response(const std::vector<sip::StatusCode>& finals) {
    sip::StatusCode best{500};
    bool have = false, have_6xx = false;
    for (const auto& sc : finals) {
        if (sc.code < 300) continue;
        const bool is_6xx = sc.code >= 600;
        if (!have || (is_6xx && !have_6xx) || (is_6xx == have_6xx && sc.code < best.code)) {
            best = sc;
            have = true;
            have_6xx = is_6xx;
        }
    }
    return best;
}

sip::SipUri aor_uri(const std::string& extension, const std::string& realm) {
    sip::SipUri uri;
    uri.user = extension;
    uri.host = realm;
    return uri;
}

}  // namespace ipts::proxy
