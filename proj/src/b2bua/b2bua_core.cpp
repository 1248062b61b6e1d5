#include "ipts/b2bua/b2bua_core.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "ipts/media/wav.hpp"
#include "ipts/sip/build.hpp"
#include "ipts/sip/digest.hpp"
#include "ipts/sip/ids.hpp"
#include "ipts/util/log.hpp"

namespace ipts::b2bua {

using sip::SipMethod;

namespace {

constexpr double kMohToneHz = 440.0;

sip::SdpDirection mirror(sip::SdpDirection offer) {
    switch (offer) {
        case sip::SdpDirection::SendOnly: return sip::SdpDirection::RecvOnly;
        case sip::SdpDirection::RecvOnly: return sip::SdpDirection::SendOnly;
        default: return offer;
    }
}

}  // namespace

sip::SdpBody rewrite_topology(const sip::SdpBody& sdp, const std::string& host, uint16_t port) {
    sip::SdpBody out = sdp;
    out.origin.clear();  // serializer re-derives it from the new connection address
    out.connection_address = host;
    out.media_port = port;
    return out;
}

B2buaCore::B2buaCore(net::Transport& transport, net::TimerQueue& timers, const net::Clock& clock,
                     media::MediaEngine& media, B2buaConfig cfg)
    : clock_(clock),
      timers_(timers),
      media_(media),
      cfg_(std::move(cfg)),
      engine_(transport, timers) {
    if (cfg_.dialplan.empty()) cfg_.dialplan = default_dialplan();
    moh_samples_ = load_audio(cfg_.moh_file);
    vm_greeting_ = load_audio(cfg_.vm_greeting_file);
    ivr_greeting_ = load_audio(cfg_.ivr.greeting_file);
    ivr_invalid_ = load_audio(cfg_.ivr.invalid_file);
    engine_.set_request_handler(
        [this](const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx) {
            on_request(req, std::move(stx));
        });
    engine_.set_ack_handler([](const sip::SipRequest&, const net::NetAddr&) {});
}

void B2buaCore::on_request(const sip::SipRequest& req,
                           std::shared_ptr<txn::ServerTransaction> stx) {
    switch (req.method.kind()) {
        case SipMethod::Options:
            respond(stx, req, 200);
            return;
        case SipMethod::Invite:
            if (sip::tag_of(req.to_value()).empty()) {
                on_new_invite(req, std::move(stx));
            } else {
                bool on_a = false;
                Call* call = find_by_leg(req.call_id(), on_a);
                if (!call) {
                    respond(stx, req, 481);
                    return;
                }
                on_reinvite(*call, on_a, req, std::move(stx));
            }
            return;
        case SipMethod::Cancel:
            on_cancel(req, std::move(stx));
            return;
        case SipMethod::Bye:
            on_bye(req, std::move(stx));
            return;
        default:
            respond(stx, req, 501);
            return;
    }
}

void B2buaCore::on_new_invite(const sip::SipRequest& req,
                              std::shared_ptr<txn::ServerTransaction> stx) {
    const std::string dialed = req.request_uri.user;
    auto rule = match_dialplan(dialed, cfg_.dialplan);
    if (!rule) {
        respond(stx, req, 404);
        return;
    }

    auto offer = sip::SdpBody::parse(req.body);
    if (!offer || offer->media_port == 0 || offer->connection_address.empty()) {
        respond(stx, req, 488);
        return;
    }

    if (calls_.count(req.call_id())) {
        respond(stx, req, 482);
        return;
    }

    Call call;
    call.a_invite = req;
    call.a_tx = stx;
    call.a.call_id = req.call_id();
    call.a.remote_value = req.from_value();
    call.a.remote_addr = stx->peer();
    call.a.invite_cseq = req.cseq() ? req.cseq()->number : 1;
    if (auto contact = req.header("Contact"))
        if (auto uri = sip::uri_of(*contact)) call.a.remote_target = *uri;
    if (call.a.remote_target.host.empty()) call.a.remote_target = req.request_uri;
    adopt_routes(call.a, req.header_values("Record-Route"), false);

    call.a.session = media_.create_session();
    if (call.a.session == 0) {
        log::error("media ports exhausted, rejecting ", dialed);
        respond(stx, req, 500);
        return;
    }
    media_.set_remote(call.a.session, {offer->connection_address, offer->media_port});

    auto [it, inserted] = calls_.emplace(call.a.call_id, std::move(call));
    (void)inserted;
    Call& c = it->second;
    switch (rule->action) {
        case DialplanAction::Bridge: start_bridge(c, *rule, *offer); break;
        case DialplanAction::Moh: start_moh(c, *offer); break;
        case DialplanAction::Voicemail: start_voicemail(c, *offer); break;
        case DialplanAction::Conference: start_conference(c, *offer); break;
        case DialplanAction::Ivr: start_ivr(c, *offer); break;
    }
}

void B2buaCore::start_bridge(Call& call, const DialplanRule& rule, const sip::SdpBody& offer) {
    auto trunk_it = cfg_.trunks.find(rule.arg);
    if (trunk_it == cfg_.trunks.end()) {
        log::error("dialplan names unknown trunk '", rule.arg, "'");
        reject_call(call, 500);
        return;
    }
    const TrunkProfile& trunk = trunk_it->second;

    call.mode = Mode::Bridge;
    call.trunk_name = rule.arg;
    call.a_tx->respond(sip::build_response(call.a_invite, sip::StatusCode(100)));

    call.b.session = media_.create_session();
    if (call.b.session == 0) {
        reject_call(call, 500);
        return;
    }

    const std::string digits = strip_pattern_prefix(call.a_invite.request_uri.user, rule.pattern);
    sip::SipUri target{"sip", digits, trunk.provider_addr.host, trunk.provider_addr.port, {}};
    sip::SipUri from_uri{"sip", trunk.username.empty() ? "b2bua" : trunk.username,
                         trunk.from_domain, std::nullopt, {}};

    call.b.call_id = sip::gen_call_id(cfg_.listen_host);
    call.b.local_value = sip::name_addr(from_uri, sip::gen_tag());
    call.b.remote_value = sip::name_addr(target);
    call.b.remote_target = target;
    call.b.remote_addr = trunk.provider_addr;
    call.b.cseq = 1;
    call.b.invite_cseq = 1;
    leg_index_[call.b.call_id] = call.a.call_id;

    auto invite = sip::RequestBuilder(SipMethod::Invite, target)
                      .via(own_via())
                      .from(call.b.local_value)
                      .to(call.b.remote_value)
                      .call_id(call.b.call_id)
                      .cseq(1)
                      .contact(own_contact())
                      .sdp(rewrite_topology(offer, cfg_.media_host,
                                            media_.session_port(call.b.session)))
                      .build();
    originate_b(call, std::move(invite), trunk.provider_addr);
}

void B2buaCore::start_moh(Call& call, const sip::SdpBody& offer) {
    call.mode = Mode::Moh;
    play_moh_to(call.a.session);
    media_.set_sink_discard(call.a.session);
    answer_a(call, mirror(offer.direction));
}

void B2buaCore::start_voicemail(Call& call, const sip::SdpBody& offer) {
    call.mode = Mode::Voicemail;
    call.vm_aor = call.a_invite.request_uri.param("target").value_or("");
    if (call.vm_aor.empty())
        if (auto from = sip::uri_of(call.a_invite.from_value())) call.vm_aor = from->user;
    if (call.vm_aor.empty()) {
        reject_call(call, 404);
        return;
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg_.vm_dir + "/" + call.vm_aor, ec);
    if (ec) {
        log::error("cannot create mailbox for ", call.vm_aor, ": ", ec.message());
        reject_call(call, 480);
        return;
    }

    media_.set_sink_record(call.a.session);
    if (!vm_greeting_.empty()) media_.set_source_file(call.a.session, vm_greeting_, false);
    answer_a(call, mirror(offer.direction));

    const std::string id = call.a.call_id;
    call.vm_timer = timers_.add(int64_t(cfg_.vm_max_s) * 1000, [this, id] {
        auto it = calls_.find(id);
        if (it == calls_.end()) return;
        Call& c = it->second;
        c.vm_timer = 0;
        finalize_voicemail(c);
        hangup_leg(c.a);
        destroy_call(c);
        calls_.erase(it);
    });
}

void B2buaCore::start_conference(Call& call, const sip::SdpBody& offer) {
    call.mode = Mode::Conference;
    call.room = call.a_invite.request_uri.user;
    if (media_.room_size(call.room) >= static_cast<size_t>(cfg_.conference_cap)) {
        reject_call(call, 486);
        return;
    }
    media_.join_room(call.a.session, call.room);
    answer_a(call, mirror(offer.direction));
}

void B2buaCore::start_ivr(Call& call, const sip::SdpBody& offer) {
    call.mode = Mode::Ivr;
    if (!ivr_greeting_.empty()) media_.set_source_file(call.a.session, ivr_greeting_, false);
    const std::string id = call.a.call_id;
    media_.set_dtmf_handler(call.a.session, [this, id](char d) { on_ivr_digit(id, d); });
    answer_a(call, mirror(offer.direction));
    arm_ivr_timer(call);
}

void B2buaCore::originate_b(Call& call, sip::SipRequest invite, const net::NetAddr& dest) {
    const std::string id = call.a.call_id;
    call.b_tx = engine_.send_request(
        std::move(invite), dest,
        [this, id](const sip::SipResponse& resp) { on_b_response(id, resp); });
}

void B2buaCore::on_b_response(const std::string& id, const sip::SipResponse& resp) {
    auto it = calls_.find(id);
    if (it == calls_.end()) return;
    Call& call = it->second;
    const int code = resp.status.code;

    if (code < 200) {
        // Ring-back and other provisionals pass through to the caller.
        if (code != 100 && !call.a.answered && !call.a_cancelled && call.a_tx)
            call.a_tx->respond(sip::build_response(call.a_invite, sip::StatusCode(code)));
        return;
    }

    if ((code == 401 || code == 407) && !call.b_auth_retried && !call.trunk_name.empty()) {
        const TrunkProfile& trunk = cfg_.trunks.at(call.trunk_name);
        if (!trunk.username.empty()) {
            retry_b_with_auth(call, resp);
            return;
        }
    }

    if (code < 300) {
        call.b.answered = true;
        call.b.remote_value = resp.to_value();
        if (auto contact = resp.header("Contact")) {
            if (auto uri = sip::uri_of(*contact)) {
                call.b.remote_target = *uri;
                call.b.remote_addr = {uri->host, uri->port_or_default()};
            }
        }
        if (call.b.route_set.empty())
            adopt_routes(call.b, resp.header_values("Record-Route"), true);
        if (auto sdp = sip::SdpBody::parse(resp.body))
            if (sdp->media_port != 0)
                media_.set_remote(call.b.session, {sdp->connection_address, sdp->media_port});
        send_ack(call.b);

        if (call.a_cancelled) {  // answer lost the race against the caller's CANCEL
            hangup_leg(call.b);
            destroy_call(call);
            calls_.erase(it);
            return;
        }
        media_.set_source_none(call.a.session);
        media_.set_source_none(call.b.session);
        media_.bridge(call.a.session, call.b.session);
        if (!call.a.answered) answer_a(call, sip::SdpDirection::SendRecv);
        return;
    }

    if (call.a_cancelled) {
        destroy_call(call);
        calls_.erase(it);
        return;
    }
    if (call.a.answered) {
        hangup_leg(call.a);  // transfer target failed under an already-answered leg
    } else if (call.a_tx) {
        call.a_tx->respond(
            sip::build_response(call.a_invite, sip::StatusCode(code, resp.status.reason)));
    }
    destroy_call(call);
    calls_.erase(it);
}

void B2buaCore::retry_b_with_auth(Call& call, const sip::SipResponse& challenge) {
    const TrunkProfile& trunk = cfg_.trunks.at(call.trunk_name);
    const bool proxy_flavor = challenge.status.code == 407;
    std::optional<sip::DigestChallenge> parsed;
    if (auto header = challenge.header(proxy_flavor ? "Proxy-Authenticate" : "WWW-Authenticate"))
        parsed = sip::DigestChallenge::parse(*header);
    if (!parsed) {
        if (call.a_tx && !call.a.answered)
            call.a_tx->respond(
                sip::build_response(call.a_invite, sip::StatusCode(challenge.status.code)));
        const std::string id = call.a.call_id;
        destroy_call(call);
        calls_.erase(id);
        return;
    }

    call.b_auth_retried = true;
    sip::SipRequest invite = call.b_tx->request();
    invite.pop_via();
    invite.push_via(own_via());
    call.b.cseq = 2;
    call.b.invite_cseq = 2;
    invite.set_header("CSeq", sip::CSeq{2, SipMethod::Invite}.to_string());

    sip::DigestCredentials creds;
    creds.username = trunk.username;
    creds.realm = parsed->realm;
    creds.nonce = parsed->nonce;
    creds.uri = invite.request_uri.to_string();
    creds.response = sip::digest_response(sip::digest_ha1(trunk.username, parsed->realm,
                                                          trunk.password),
                                          parsed->nonce, "INVITE", creds.uri);
    invite.set_header(proxy_flavor ? "Proxy-Authorization" : "Authorization",
                      creds.to_header_value());
    originate_b(call, std::move(invite), call.b.remote_addr);
}

void B2buaCore::answer_a(Call& call, sip::SdpDirection direction) {
    auto resp = sip::build_response(call.a_invite, sip::StatusCode(200));
    resp.set_header("Contact", own_contact());
    resp.set_header("Content-Type", "application/sdp");
    resp.body =
        sip::make_audio_sdp(cfg_.media_host, media_.session_port(call.a.session), direction)
            .to_string();
    call.a.local_value = resp.to_value();
    call.a.answered = true;
    call.answered_ms = clock_.now_ms();
    if (call.a_tx) call.a_tx->respond(resp);
}

void B2buaCore::on_ivr_digit(const std::string& id, char digit) {
    auto it = calls_.find(id);
    if (it == calls_.end()) return;
    Call& call = it->second;
    if (call.mode != Mode::Ivr || call.ivr_busy) return;
    if (call.ivr_timer) {
        timers_.cancel(call.ivr_timer);
        call.ivr_timer = 0;
    }

    auto target = cfg_.ivr.digit_map.find(digit);
    if (target == cfg_.ivr.digit_map.end()) {
        ivr_strike(call);
        return;
    }

    call.ivr_busy = true;
    media_.set_source_none(call.a.session);

    call.b.session = media_.create_session();
    if (call.b.session == 0) {
        hangup_leg(call.a);
        destroy_call(call);
        calls_.erase(it);
        return;
    }

    std::string caller_user = "b2bua";
    if (auto from = sip::uri_of(call.a_invite.from_value()))
        if (!from->user.empty()) caller_user = from->user;
    sip::SipUri target_uri{"sip", target->second, cfg_.realm, std::nullopt, {}};

    call.b.call_id = sip::gen_call_id(cfg_.listen_host);
    call.b.local_value = sip::name_addr(
        sip::SipUri{"sip", caller_user, cfg_.realm, std::nullopt, {}}, sip::gen_tag());
    call.b.remote_value = sip::name_addr(target_uri);
    call.b.remote_target = target_uri;
    call.b.remote_addr = cfg_.proxy_addr;
    call.b.cseq = 1;
    call.b.invite_cseq = 1;
    leg_index_[call.b.call_id] = call.a.call_id;

    auto invite =
        sip::RequestBuilder(SipMethod::Invite, target_uri)
            .via(own_via())
            .from(call.b.local_value)
            .to(call.b.remote_value)
            .call_id(call.b.call_id)
            .cseq(1)
            .contact(own_contact())
            .sdp(sip::make_audio_sdp(cfg_.media_host, media_.session_port(call.b.session)))
            .build();
    originate_b(call, std::move(invite), cfg_.proxy_addr);
}

void B2buaCore::ivr_strike(Call& call) {
    ++call.ivr_attempts;
    if (call.ivr_attempts >= 3) {
        const std::string id = call.a.call_id;
        hangup_leg(call.a);
        destroy_call(call);
        calls_.erase(id);
        return;
    }
    std::vector<int16_t> prompt = ivr_invalid_;
    prompt.insert(prompt.end(), ivr_greeting_.begin(), ivr_greeting_.end());
    if (!prompt.empty()) media_.set_source_file(call.a.session, std::move(prompt), false);
    arm_ivr_timer(call);
}

void B2buaCore::arm_ivr_timer(Call& call) {
    if (call.ivr_timer) timers_.cancel(call.ivr_timer);
    const std::string id = call.a.call_id;
    call.ivr_timer = timers_.add(int64_t(cfg_.ivr.timeout_s) * 1000, [this, id] {
        auto it = calls_.find(id);
        if (it == calls_.end()) return;
        it->second.ivr_timer = 0;
        if (!it->second.ivr_busy) ivr_strike(it->second);
    });
}

void B2buaCore::on_cancel(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx) {
    auto it = calls_.find(req.call_id());
    if (it == calls_.end()) {
        respond(stx, req, 481);
        return;
    }
    respond(stx, req, 200);
    Call& call = it->second;
    if (call.a.answered || call.a_cancelled) return;  // too late or already cancelling
    call.a_cancelled = true;
    if (call.a_tx) call.a_tx->respond(sip::build_response(call.a_invite, sip::StatusCode(487)));
    if (call.b_tx && !call.b_tx->terminated()) {
        engine_.send_request(txn::make_cancel(call.b_tx->request()), call.b.remote_addr,
                             [](const sip::SipResponse&) {});
        return;  // leg B's final sweeps the call away
    }
    destroy_call(call);
    calls_.erase(it);
}

void B2buaCore::on_bye(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx) {
    bool on_a = false;
    Call* call = find_by_leg(req.call_id(), on_a);
    if (!call) {
        respond(stx, req, 481);
        return;
    }
    respond(stx, req, 200);
    const std::string id = call->a.call_id;

    if (call->vm_timer) {
        timers_.cancel(call->vm_timer);
        call->vm_timer = 0;
    }
    if (call->mode == Mode::Voicemail) finalize_voicemail(*call);
    if (!call->a.answered && !call->a_cancelled && call->a_tx)
        call->a_tx->respond(sip::build_response(call->a_invite, sip::StatusCode(487)));

    hangup_leg(on_a ? call->b : call->a);
    destroy_call(*call);
    calls_.erase(id);
}

void B2buaCore::on_reinvite(Call& call, bool on_a, const sip::SipRequest& req,
                            std::shared_ptr<txn::ServerTransaction> stx) {
    Leg& leg = on_a ? call.a : call.b;
    auto offer = sip::SdpBody::parse(req.body);
    if (offer && offer->media_port != 0 && !offer->connection_address.empty() &&
        offer->connection_address != "0.0.0.0" && leg.session != 0)
        media_.set_remote(leg.session, {offer->connection_address, offer->media_port});

    sip::SdpDirection answer_dir = sip::SdpDirection::SendRecv;
    const bool bridged = call.mode == Mode::Bridge || (call.mode == Mode::Ivr && call.b.answered);
    if (bridged) {
        const bool hold = sip::sdp_signals_hold(req.body);
        bool& holder = on_a ? call.a_holds : call.b_holds;
        if (hold != holder) {
            holder = hold;
            apply_media_state(call);
        }
        if (offer && offer->direction == sip::SdpDirection::SendOnly)
            answer_dir = sip::SdpDirection::RecvOnly;
    }

    auto resp = sip::build_response(req, sip::StatusCode(200));
    resp.set_header("Contact", own_contact());
    resp.set_header("Content-Type", "application/sdp");
    resp.body =
        sip::make_audio_sdp(cfg_.media_host, media_.session_port(leg.session), answer_dir)
            .to_string();
    stx->respond(resp);
}

void B2buaCore::apply_media_state(Call& call) {
    if (call.a.session == 0 || call.b.session == 0) return;
    if (!call.a_holds && !call.b_holds) {
        media_.set_source_none(call.a.session);
        media_.set_source_none(call.b.session);
        media_.bridge(call.a.session, call.b.session);
        return;
    }
    media_.unbridge(call.a.session);
    if (call.a_holds)
        play_moh_to(call.b.session);
    else
        media_.set_source_none(call.b.session);
    if (call.b_holds)
        play_moh_to(call.a.session);
    else
        media_.set_source_none(call.a.session);
}

void B2buaCore::finalize_voicemail(Call& call) {
    if (call.a.session == 0) return;
    const auto& samples = media_.recorded(call.a.session);
    if (samples.empty()) return;  // caller left nothing

    const std::string dir = cfg_.vm_dir + "/" + call.vm_aor;
    const std::string name = std::to_string(call.answered_ms) + ".wav";
    if (!media::write_wav(dir + "/" + name, samples)) {
        log::error("cannot write recording ", dir, "/", name);
        return;
    }
    const int64_t duration_ms = int64_t(samples.size()) * 1000 / media::kSampleRate;
    std::ofstream index(dir + "/index", std::ios::app);
    index << call.answered_ms << "," << duration_ms << "," << name << "\n";
}

void B2buaCore::hangup_leg(Leg& leg) {
    if (!leg.answered || leg.bye_sent || leg.call_id.empty()) return;
    leg.bye_sent = true;
    engine_.send_request(build_in_dialog(leg, SipMethod::Bye), leg_dest(leg),
                         [](const sip::SipResponse&) {});
}

void B2buaCore::adopt_routes(Leg& leg, std::vector<std::string> record_routes, bool reverse) {
    if (record_routes.empty()) return;
    if (reverse) std::reverse(record_routes.begin(), record_routes.end());
    leg.route_set = std::move(record_routes);
    if (auto uri = sip::uri_of(leg.route_set.front()))
        leg.route_addr = {uri->host, uri->port_or_default()};
}

net::NetAddr B2buaCore::leg_dest(const Leg& leg) const {
    return leg.route_addr.valid() ? leg.route_addr : leg.remote_addr;
}

void B2buaCore::reject_call(Call& call, int code) {
    if (call.a_tx) call.a_tx->respond(sip::build_response(call.a_invite, sip::StatusCode(code)));
    const std::string id = call.a.call_id;
    destroy_call(call);
    calls_.erase(id);
}

void B2buaCore::destroy_call(Call& call) {
    if (call.vm_timer) {
        timers_.cancel(call.vm_timer);
        call.vm_timer = 0;
    }
    if (call.ivr_timer) {
        timers_.cancel(call.ivr_timer);
        call.ivr_timer = 0;
    }
    if (call.a.session != 0) {
        media_.destroy_session(call.a.session);
        call.a.session = 0;
    }
    if (call.b.session != 0) {
        media_.destroy_session(call.b.session);
        call.b.session = 0;
    }
    if (!call.b.call_id.empty()) leg_index_.erase(call.b.call_id);
}

sip::SipRequest B2buaCore::build_in_dialog(Leg& leg, sip::SipMethod method) {
    auto req = sip::RequestBuilder(method, leg.remote_target)
                   .via(own_via())
                   .from(leg.local_value)
                   .to(leg.remote_value)
                   .call_id(leg.call_id)
                   .cseq(++leg.cseq, method)
                   .contact(own_contact())
                   .build();
    for (const auto& route : leg.route_set) req.add_header("Route", route);
    return req;
}

void B2buaCore::send_ack(Leg& leg) {
    auto ack = sip::RequestBuilder(SipMethod::Ack, leg.remote_target)
                   .via(own_via())
                   .from(leg.local_value)
                   .to(leg.remote_value)
                   .call_id(leg.call_id)
                   .cseq(leg.invite_cseq, SipMethod::Ack)
                   .build();
    for (const auto& route : leg.route_set) ack.add_header("Route", route);
    engine_.stateless_send(sip::SipMessage{std::move(ack)}, leg_dest(leg));
}

sip::Via B2buaCore::own_via() const {
    sip::Via via;
    via.host = cfg_.listen_host;
    via.port = cfg_.listen_port;
    via.params.emplace_back("branch", sip::gen_branch());
    return via;
}

std::string B2buaCore::own_contact() const {
    return sip::name_addr(sip::SipUri{"sip", "b2bua", cfg_.listen_host, cfg_.listen_port, {}});
}

B2buaCore::Call* B2buaCore::find_by_leg(const std::string& call_id, bool& on_a) {
    auto it = calls_.find(call_id);
    if (it != calls_.end()) {
        on_a = true;
        return &it->second;
    }
    auto idx = leg_index_.find(call_id);
    if (idx == leg_index_.end()) return nullptr;
    it = calls_.find(idx->second);
    if (it == calls_.end()) return nullptr;
    on_a = false;
    return &it->second;
}

void B2buaCore::respond(const std::shared_ptr<txn::ServerTransaction>& stx,
                        const sip::SipRequest& req, int code) {
    stx->respond(sip::build_response(req, sip::StatusCode(code)));
}

void B2buaCore::play_moh_to(media::SessionId sid) {
    if (!moh_samples_.empty())
        media_.set_source_file(sid, moh_samples_, true);
    else
        media_.set_source_tone(sid, kMohToneHz);
}

std::vector<int16_t> B2buaCore::load_audio(const std::string& path) const {
    if (path.empty()) return {};
    auto wav = media::read_wav(path);
    if (!wav) {
        log::warn("cannot read audio file ", path);
        return {};
    }
    return std::move(wav->samples);
}

}  // namespace ipts::b2bua
