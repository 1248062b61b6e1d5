#include "ipts/ua/softphone.hpp"

#include <algorithm>

#include "ipts/sip/build.hpp"
#include "ipts/sip/ids.hpp"
#include "ipts/util/log.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::ua {

using sip::SipMethod;

namespace {

sip::SdpDirection mirror(sip::SdpDirection offer) {
    switch (offer) {
        case sip::SdpDirection::SendOnly: return sip::SdpDirection::RecvOnly;
        case sip::SdpDirection::RecvOnly: return sip::SdpDirection::SendOnly;
        default: return offer;
    }
}

bool valid_dtmf(char d) {
    return (d >= '0' && d <= '9') || d == '*' || d == '#';
}

}  // namespace

const char* to_string(RegState s) {
    switch (s) {
        case RegState::Unregistered: return "unregistered";
        case RegState::Registering: return "registering";
        case RegState::Registered: return "registered";
    }
    return "?";
}

const char* to_string(CallState s) {
    switch (s) {
        case CallState::Idle: return "idle";
        case CallState::RingingIn: return "ringing-in";
        case CallState::RingingOut: return "ringing-out";
        case CallState::Active: return "active";
        case CallState::Held: return "held";
    }
    return "?";
}

Softphone::Softphone(net::Transport& transport, net::TimerQueue& timers, const net::Clock& clock,
                     media::MediaEngine& media, SoftphoneConfig cfg)
    : clock_(clock),
      timers_(timers),
      media_(media),
      cfg_(std::move(cfg)),
      engine_(transport, timers) {
    reg_call_id_ = sip::gen_call_id(cfg_.local_host);
    engine_.set_request_handler(
        [this](const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx) {
            on_request(req, std::move(stx));
        });
    engine_.set_ack_handler([](const sip::SipRequest&, const net::NetAddr&) {});
}

Softphone::~Softphone() {
    cancel_ring_timer();
    if (refresh_timer_) timers_.cancel(refresh_timer_);
}

std::string Softphone::command(const std::string& line) {
    auto args = util::split_ws(line);
    if (args.empty()) return "";
    const std::string verb = args[0];
    args.erase(args.begin());

    if (verb == "register") {
        if (args.size() == 3) {
            auto proxy = net::NetAddr::parse(args[2]);
            if (!proxy || !proxy->valid()) return "bad proxy address: " + args[2];
            cfg_.ext = args[0];
            cfg_.password = args[1];
            cfg_.proxy = *proxy;
        } else if (!args.empty()) {
            return "usage: register <ext> <pass> <host:port>";
        }
        return do_register();
    }
    if (verb == "call") {
        if (args.size() != 1) return "usage: call <digits>";
        return do_call(args[0]);
    }
    if (verb == "answer") return do_answer();
    if (verb == "hold") return do_hold();
    if (verb == "unhold") return do_unhold();
    if (verb == "dtmf") {
        if (args.size() != 1 || args[0].size() != 1) return "usage: dtmf <digit>";
        return do_dtmf(args[0][0]);
    }
    if (verb == "transfer") {
        if (args.size() != 1) return "usage: transfer <digits>";
        return do_transfer(args[0]);
    }
    if (verb == "forward") {
        if (args.size() != 1) return "usage: forward <digits>|off";
        return do_forward(args[0]);
    }
    if (verb == "hangup") return do_hangup();
    return "unknown command: " + verb;
}

// ---- registration ----

std::string Softphone::do_register() {
    if (cfg_.ext.empty() || !cfg_.proxy.valid()) return "no account configured";
    reg_state_ = RegState::Registering;
    reg_auth_retried_ = false;
    reg_min_retried_ = false;
    send_register(cfg_.register_expires_s);
    return "";
}

void Softphone::do_unregister() {
    if (refresh_timer_) {
        timers_.cancel(refresh_timer_);
        refresh_timer_ = 0;
    }
    if (reg_state_ == RegState::Unregistered) return;
    reg_auth_retried_ = false;
    send_register(0);
}

void Softphone::send_register(int expires_s) {
    sip::SipUri domain{"sip", "", cfg_.realm, std::nullopt, {}};
    auto req = sip::RequestBuilder(SipMethod::Register, domain)
                   .via(own_via())
                   .from(sip::name_addr(own_uri(), sip::gen_tag()))
                   .to(sip::name_addr(own_uri()))
                   .call_id(reg_call_id_)
                   .cseq(++reg_cseq_, SipMethod::Register)
                   .contact(own_contact())
                   .header("Expires", std::to_string(expires_s))
                   .build();
    engine_.send_request(std::move(req), cfg_.proxy,
                         [this, expires_s](const sip::SipResponse& resp) {
                             on_register_response(resp, expires_s);
                         });
}

void Softphone::on_register_response(const sip::SipResponse& resp, int expires_s) {
    const int code = resp.status.code;
    if (code < 200) return;

    if (code == 401 && !reg_auth_retried_) {
        reg_auth_retried_ = true;
        sip::SipUri domain{"sip", "", cfg_.realm, std::nullopt, {}};
        auto req = sip::RequestBuilder(SipMethod::Register, domain)
                       .via(own_via())
                       .from(sip::name_addr(own_uri(), sip::gen_tag()))
                       .to(sip::name_addr(own_uri()))
                       .call_id(reg_call_id_)
                       .cseq(++reg_cseq_, SipMethod::Register)
                       .contact(own_contact())
                       .header("Expires", std::to_string(expires_s))
                       .build();
        if (!sip::apply_digest_auth(req, resp, cfg_.ext, cfg_.password)) {
            reg_state_ = RegState::Unregistered;
            fire("register_failed", "401");
            return;
        }
        engine_.send_request(std::move(req), cfg_.proxy,
                             [this, expires_s](const sip::SipResponse& r) {
                                 on_register_response(r, expires_s);
                             });
        return;
    }

    if (code == 423 && !reg_min_retried_) {
        reg_min_retried_ = true;
        if (auto min = util::parse_int<int>(resp.header("Min-Expires").value_or(""))) {
            cfg_.register_expires_s = std::max(cfg_.register_expires_s, *min);
            reg_auth_retried_ = false;
            send_register(cfg_.register_expires_s);
            return;
        }
    }

    if (code >= 300) {
        reg_state_ = RegState::Unregistered;
        fire("register_failed", std::to_string(code));
        return;
    }

    if (expires_s == 0) {
        reg_state_ = RegState::Unregistered;
        fire("unregistered");
        return;
    }

    // The registrar reports the granted lifetime on our own contact.
    int granted = expires_s;
    for (const auto& value : resp.header_values("Contact")) {
        auto uri = sip::uri_of(value);
        if (!uri || uri->host != cfg_.local_host || uri->port_or_default() != cfg_.local_port)
            continue;
        if (auto e = util::parse_int<int>(sip::header_param(value, "expires").value_or("")))
            granted = *e;
    }
    reg_state_ = RegState::Registered;
    fire("registered", std::to_string(granted));
    arm_refresh(std::max<int64_t>(1000, int64_t(granted) * 1000 / 2));
}

void Softphone::arm_refresh(int64_t delay_ms) {
    if (refresh_timer_) timers_.cancel(refresh_timer_);
    refresh_timer_ = timers_.add(delay_ms, [this] {
        refresh_timer_ = 0;
        if (reg_state_ != RegState::Registered) return;
        reg_state_ = RegState::Registering;
        reg_auth_retried_ = false;
        send_register(cfg_.register_expires_s);
    });
}

// ---- outgoing calls ----

Softphone::Dialog Softphone::make_uac_dialog(const std::string& digits) {
    Dialog d;
    d.session = media_.create_session();
    if (d.session == 0) return d;
    d.call_id = sip::gen_call_id(cfg_.local_host);
    d.remote_target = sip::SipUri{"sip", digits, cfg_.realm, std::nullopt, {}};
    d.local_value = sip::name_addr(own_uri(), sip::gen_tag());
    d.remote_value = sip::name_addr(d.remote_target);
    d.remote_addr = cfg_.proxy;
    d.cseq = 1;
    d.invite_cseq = 1;
    d.invite = sip::RequestBuilder(SipMethod::Invite, d.remote_target)
                   .via(own_via())
                   .from(d.local_value)
                   .to(d.remote_value)
                   .call_id(d.call_id)
                   .cseq(1)
                   .contact(own_contact())
                   .sdp(sip::make_audio_sdp(cfg_.local_host, media_.session_port(d.session)))
                   .build();
    return d;
}

std::string Softphone::do_call(const std::string& digits) {
    if (call_state_ != CallState::Idle) return "busy (state " + std::string(to_string(call_state_)) + ")";
    if (digits.empty()) return "nothing to dial";
    Dialog d = make_uac_dialog(digits);
    if (d.session == 0) return "no media port available";
    main_ = std::move(d);
    main_->tx = engine_.send_request(sip::SipRequest(main_->invite), cfg_.proxy,
                                     [this](const sip::SipResponse& r) { on_call_response(r); });
    call_state_ = CallState::RingingOut;
    fire("calling", digits);
    return "";
}

void Softphone::on_call_response(const sip::SipResponse& resp) {
    if (!main_ || main_->answered) return;
    const int code = resp.status.code;

    if (code < 200) {
        if (code != 100 && !main_->cancelled) fire("ringing", std::to_string(code));
        return;
    }

    if ((code == 401 || code == 407) && !main_->auth_retried && !main_->cancelled) {
        main_->auth_retried = true;
        sip::SipRequest retry = main_->invite;
        retry.remove_header("Via");
        retry.push_via(own_via());
        main_->cseq = 2;
        main_->invite_cseq = 2;
        retry.set_header("CSeq", sip::CSeq{2, SipMethod::Invite}.to_string());
        if (sip::apply_digest_auth(retry, resp, cfg_.ext, cfg_.password)) {
            main_->invite = retry;
            main_->tx = engine_.send_request(std::move(retry), cfg_.proxy,
                                             [this](const sip::SipResponse& r) {
                                                 on_call_response(r);
                                             });
            return;
        }
    }

    if (code < 300) {
        establish_uac(*main_, resp);
        if (main_->cancelled) {  // answered before our CANCEL took hold
            send_bye(*main_);
            teardown_call("hungup", "");
            return;
        }
        call_state_ = CallState::Active;
        start_media(*main_);
        fire("answered", std::to_string(code));
        return;
    }

    const std::string detail = std::to_string(code) + " " + resp.status.reason;
    teardown_call(main_->cancelled || code == 487 ? "hungup" : "call_failed",
                  main_->cancelled || code == 487 ? "" : detail);
}

void Softphone::establish_uac(Dialog& d, const sip::SipResponse& resp) {
    d.answered = true;
    d.remote_value = resp.to_value();
    if (auto contact = resp.header("Contact"))
        if (auto uri = sip::uri_of(*contact)) d.remote_target = *uri;
    adopt_routes(d, resp.header_values("Record-Route"), true);
    if (auto sdp = sip::SdpBody::parse(resp.body))
        if (sdp->media_port != 0)
            media_.set_remote(d.session, {sdp->connection_address, sdp->media_port});
    send_ack(d);
    d.tx.reset();
}

// ---- incoming calls ----

void Softphone::on_request(const sip::SipRequest& req,
                           std::shared_ptr<txn::ServerTransaction> stx) {
    switch (req.method.kind()) {
        case SipMethod::Options:
            stx->respond(sip::build_response(req, sip::StatusCode(200)));
            return;
        case SipMethod::Invite:
            if (sip::tag_of(req.to_value()).empty()) {
                on_invite(req, std::move(stx));
            } else if (main_ && main_->call_id == req.call_id()) {
                on_reinvite(*main_, req, std::move(stx));
            } else if (xfer_ && xfer_->call_id == req.call_id()) {
                on_reinvite(*xfer_, req, std::move(stx));
            } else {
                stx->respond(sip::build_response(req, sip::StatusCode(481)));
            }
            return;
        case SipMethod::Cancel:
            on_cancel(req, std::move(stx));
            return;
        case SipMethod::Bye:
            on_bye(req, std::move(stx));
            return;
        default:
            stx->respond(sip::build_response(req, sip::StatusCode(501)));
            return;
    }
}

void Softphone::on_invite(const sip::SipRequest& req,
                          std::shared_ptr<txn::ServerTransaction> stx) {
    std::string from_ext;
    if (auto from = sip::uri_of(req.from_value())) from_ext = from->user;

    if (forward_target_) {
        auto resp = sip::build_response(req, sip::StatusCode(302));
        resp.set_header("Contact",
                        sip::name_addr(sip::SipUri{"sip", *forward_target_, cfg_.realm,
                                                   std::nullopt, {}}));
        stx->respond(resp);
        fire("forwarded", *forward_target_);
        return;
    }
    if (call_state_ != CallState::Idle || main_) {
        stx->respond(sip::build_response(req, sip::StatusCode(486)));
        fire("rejected_busy", from_ext);
        return;
    }
    auto offer = sip::SdpBody::parse(req.body);
    if (!offer || offer->media_port == 0) {
        stx->respond(sip::build_response(req, sip::StatusCode(488)));
        return;
    }

    Dialog d;
    d.call_id = req.call_id();
    d.invite = req;
    d.rx_invite_tx = stx;
    d.remote_value = req.from_value();
    d.remote_addr = stx->peer();
    d.invite_cseq = req.cseq() ? req.cseq()->number : 1;
    if (auto contact = req.header("Contact"))
        if (auto uri = sip::uri_of(*contact)) d.remote_target = *uri;
    if (d.remote_target.host.empty()) d.remote_target = req.request_uri;
    adopt_routes(d, req.header_values("Record-Route"), false);
    main_ = std::move(d);

    stx->respond(sip::build_response(req, sip::StatusCode(180)));
    call_state_ = CallState::RingingIn;
    fire("incoming", from_ext);
    arm_ring_timer();
}

std::string Softphone::do_answer() {
    if (call_state_ != CallState::RingingIn || !main_) return "no call to answer";
    cancel_ring_timer();

    main_->session = media_.create_session();
    if (main_->session == 0) {
        main_->rx_invite_tx->respond(sip::build_response(main_->invite, sip::StatusCode(500)));
        teardown_call("call_failed", "no media port");
        return "no media port available";
    }
    auto offer = sip::SdpBody::parse(main_->invite.body);
    media_.set_remote(main_->session, {offer->connection_address, offer->media_port});

    auto resp = sip::build_response(main_->invite, sip::StatusCode(200));
    resp.set_header("Contact", own_contact());
    resp.set_header("Content-Type", "application/sdp");
    resp.body = sip::make_audio_sdp(cfg_.local_host, media_.session_port(main_->session),
                                    mirror(offer->direction))
                    .to_string();
    main_->local_value = resp.to_value();
    main_->answered = true;
    main_->rx_invite_tx->respond(resp);
    main_->rx_invite_tx.reset();

    call_state_ = CallState::Active;
    start_media(*main_);
    fire("answered");
    return "";
}

void Softphone::on_reinvite(Dialog& d, const sip::SipRequest& req,
                            std::shared_ptr<txn::ServerTransaction> stx) {
    auto offer = sip::SdpBody::parse(req.body);
    if (offer && offer->media_port != 0 && !offer->connection_address.empty() &&
        offer->connection_address != "0.0.0.0" && d.session != 0)
        media_.set_remote(d.session, {offer->connection_address, offer->media_port});

    const bool hold = sip::sdp_signals_hold(req.body);
    if (hold != d.peer_holds) {
        d.peer_holds = hold;
        fire(hold ? "peer_hold" : "peer_resume");
    }

    auto resp = sip::build_response(req, sip::StatusCode(200));
    resp.set_header("Contact", own_contact());
    resp.set_header("Content-Type", "application/sdp");
    sip::SdpDirection dir = offer ? mirror(offer->direction) : sip::SdpDirection::SendRecv;
    resp.body = sip::make_audio_sdp(cfg_.local_host, media_.session_port(d.session), dir)
                    .to_string();
    stx->respond(resp);
}

void Softphone::on_cancel(const sip::SipRequest& req,
                          std::shared_ptr<txn::ServerTransaction> stx) {
    if (!main_ || main_->call_id != req.call_id() || main_->answered ||
        call_state_ != CallState::RingingIn) {
        stx->respond(sip::build_response(req, sip::StatusCode(481)));
        return;
    }
    stx->respond(sip::build_response(req, sip::StatusCode(200)));
    if (main_->rx_invite_tx)
        main_->rx_invite_tx->respond(sip::build_response(main_->invite, sip::StatusCode(487)));
    teardown_call("cancelled", "");
}

void Softphone::on_bye(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx) {
    Dialog* d = nullptr;
    if (main_ && main_->call_id == req.call_id()) d = &*main_;
    if (xfer_ && xfer_->call_id == req.call_id()) d = &*xfer_;
    if (!d || !d->answered) {
        stx->respond(sip::build_response(req, sip::StatusCode(481)));
        return;
    }
    stx->respond(sip::build_response(req, sip::StatusCode(200)));
    d->answered = false;  // nothing left to BYE on this dialog
    if (main_ && d != &*main_ && main_->answered) send_bye(*main_);
    if (xfer_ && d != &*xfer_ && xfer_->answered) send_bye(*xfer_);
    teardown_call("bye", "");
}

// ---- mid-call features ----

std::string Softphone::do_hold() {
    if (call_state_ != CallState::Active || !main_) return "no active call";
    send_reinvite(sip::SdpDirection::SendOnly, CallState::Held, "held");
    return "";
}

std::string Softphone::do_unhold() {
    if (call_state_ != CallState::Held || !main_) return "not on hold";
    send_reinvite(sip::SdpDirection::SendRecv, CallState::Active, "resumed");
    return "";
}

void Softphone::send_reinvite(sip::SdpDirection direction, CallState on_ok, const char* event) {
    auto req = build_in_dialog(*main_, SipMethod::Invite);
    main_->invite_cseq = main_->cseq;
    req.set_header("Content-Type", "application/sdp");
    req.body = sip::make_audio_sdp(cfg_.local_host, media_.session_port(main_->session),
                                   direction)
                   .to_string();
    const std::string ev = event;
    engine_.send_request(std::move(req), dialog_dest(*main_),
                         [this, on_ok, ev](const sip::SipResponse& resp) {
                             if (!main_ || !main_->answered) return;
                             if (resp.status.code >= 300) {
                                 fire(ev + "_failed", std::to_string(resp.status.code));
                                 return;
                             }
                             if (resp.status.code < 200) return;
                             send_ack(*main_);
                             call_state_ = on_ok;
                             fire(ev);
                         });
}

std::string Softphone::do_dtmf(char digit) {
    if (call_state_ != CallState::Active || !main_ || main_->session == 0)
        return "no active call";
    if (!valid_dtmf(digit)) return "not a dialable digit";
    media_.send_dtmf(main_->session, digit);
    fire("dtmf", std::string(1, digit));
    return "";
}

std::string Softphone::do_transfer(const std::string& digits) {
    if (call_state_ != CallState::Active || !main_) return "no active call";
    if (xfer_) return "transfer already in progress";
    Dialog d = make_uac_dialog(digits);
    if (d.session == 0) return "no media port available";
    xfer_ = std::move(d);
    xfer_->tx = engine_.send_request(sip::SipRequest(xfer_->invite), cfg_.proxy,
                                     [this](const sip::SipResponse& r) { on_xfer_response(r); });
    fire("transfer_ringing", digits);
    return "";
}

void Softphone::on_xfer_response(const sip::SipResponse& resp) {
    if (!xfer_ || xfer_->answered || !main_) return;
    const int code = resp.status.code;
    if (code < 200) return;

    if ((code == 401 || code == 407) && !xfer_->auth_retried) {
        xfer_->auth_retried = true;
        sip::SipRequest retry = xfer_->invite;
        retry.remove_header("Via");
        retry.push_via(own_via());
        xfer_->cseq = 2;
        xfer_->invite_cseq = 2;
        retry.set_header("CSeq", sip::CSeq{2, SipMethod::Invite}.to_string());
        if (sip::apply_digest_auth(retry, resp, cfg_.ext, cfg_.password)) {
            xfer_->invite = retry;
            xfer_->tx = engine_.send_request(std::move(retry), cfg_.proxy,
                                             [this](const sip::SipResponse& r) {
                                                 on_xfer_response(r);
                                             });
            return;
        }
    }

    if (code < 300) {
        establish_uac(*xfer_, resp);
        // Drop out of the conversation: the two remote parties talk through us.
        media_.set_source_none(main_->session);
        media_.set_source_none(xfer_->session);
        media_.bridge(main_->session, xfer_->session);
        fire("transferred");
        return;
    }

    media_.destroy_session(xfer_->session);
    xfer_.reset();
    fire("transfer_failed", std::to_string(code));
}

std::string Softphone::do_forward(const std::string& target_or_off) {
    if (target_or_off == "off") {
        forward_target_.reset();
        fire("forward_cleared");
        return "";
    }
    if (!util::all_digits(target_or_off)) return "forward target must be digits or 'off'";
    forward_target_ = target_or_off;
    fire("forward_set", target_or_off);
    return "";
}

std::string Softphone::do_hangup() {
    switch (call_state_) {
        case CallState::Idle:
            return "no call";
        case CallState::RingingOut:
            if (main_ && main_->tx && !main_->tx->terminated() && !main_->cancelled) {
                main_->cancelled = true;
                engine_.send_request(txn::make_cancel(main_->tx->request()), cfg_.proxy,
                                     [](const sip::SipResponse&) {});
            }
            return "";  // the 487 finishes the teardown
        case CallState::RingingIn:
            cancel_ring_timer();
            if (main_ && main_->rx_invite_tx)
                main_->rx_invite_tx->respond(
                    sip::build_response(main_->invite, sip::StatusCode(603)));
            teardown_call("declined", "");
            return "";
        case CallState::Active:
        case CallState::Held:
            if (main_ && main_->answered) send_bye(*main_);
            if (xfer_ && xfer_->answered) send_bye(*xfer_);
            teardown_call("hungup", "");
            return "";
    }
    return "";
}

// ---- plumbing ----

void Softphone::start_media(Dialog& d) {
    if (cfg_.tone_hz > 0)
        media_.set_source_tone(d.session, cfg_.tone_hz);
    else
        media_.set_source_none(d.session);
    media_.set_sink_record(d.session);
    fire("media", "local=" + std::to_string(media_.session_port(d.session)) +
                      " peer=" + media_.session_remote(d.session).to_string());
}

sip::SipRequest Softphone::build_in_dialog(Dialog& d, sip::SipMethod method) {
    auto req = sip::RequestBuilder(method, d.remote_target)
                   .via(own_via())
                   .from(d.local_value)
                   .to(d.remote_value)
                   .call_id(d.call_id)
                   .cseq(++d.cseq, method)
                   .contact(own_contact())
                   .build();
    for (const auto& route : d.route_set) req.add_header("Route", route);
    return req;
}

void Softphone::send_ack(Dialog& d) {
    auto ack = sip::RequestBuilder(SipMethod::Ack, d.remote_target)
                   .via(own_via())
                   .from(d.local_value)
                   .to(d.remote_value)
                   .call_id(d.call_id)
                   .cseq(d.invite_cseq, SipMethod::Ack)
                   .build();
    for (const auto& route : d.route_set) ack.add_header("Route", route);
    engine_.stateless_send(sip::SipMessage{std::move(ack)}, dialog_dest(d));
}

void Softphone::send_bye(Dialog& d) {
    d.answered = false;
    engine_.send_request(build_in_dialog(d, SipMethod::Bye), dialog_dest(d),
                         [](const sip::SipResponse&) {});
}

net::NetAddr Softphone::dialog_dest(const Dialog& d) const {
    return d.route_addr.valid() ? d.route_addr : d.remote_addr;
}

void Softphone::adopt_routes(Dialog& d, std::vector<std::string> record_routes, bool reverse) {
    if (record_routes.empty()) return;
    if (reverse) std::reverse(record_routes.begin(), record_routes.end());
    d.route_set = std::move(record_routes);
    if (auto uri = sip::uri_of(d.route_set.front()))
        d.route_addr = {uri->host, uri->port_or_default()};
}

void Softphone::teardown_call(const char* event, const std::string& detail) {
    cancel_ring_timer();
    if (main_ && main_->session != 0) {
        last_capture_ = media_.recorded(main_->session);
        media_.destroy_session(main_->session);
    }
    if (xfer_ && xfer_->session != 0) media_.destroy_session(xfer_->session);
    main_.reset();
    xfer_.reset();
    call_state_ = CallState::Idle;
    fire(event, detail);
}

void Softphone::arm_ring_timer() {
    cancel_ring_timer();
    ring_timer_ = timers_.add(int64_t(cfg_.ring_timeout_s) * 1000, [this] {
        ring_timer_ = 0;
        if (call_state_ != CallState::RingingIn || !main_ || main_->answered) return;
        if (main_->rx_invite_tx)
            main_->rx_invite_tx->respond(
                sip::build_response(main_->invite, sip::StatusCode(480)));
        teardown_call("ring_timeout", "");
    });
}

void Softphone::cancel_ring_timer() {
    if (ring_timer_) {
        timers_.cancel(ring_timer_);
        ring_timer_ = 0;
    }
}

void Softphone::fire(const std::string& event, const std::string& detail) {
    if (sink_) sink_(event, detail);
}

sip::Via Softphone::own_via() const {
    sip::Via via;
    via.host = cfg_.local_host;
    via.port = cfg_.local_port;
    via.params.emplace_back("branch", sip::gen_branch());
    return via;
}

std::string Softphone::own_contact() const {
    return sip::name_addr(sip::SipUri{"sip", cfg_.ext, cfg_.local_host, cfg_.local_port, {}});
}

sip::SipUri Softphone::own_uri() const {
    return sip::SipUri{"sip", cfg_.ext, cfg_.realm, std::nullopt, {}};
}

media::SessionId Softphone::main_session() const {
    return main_ ? main_->session : 0;
}

std::vector<int16_t> Softphone::take_capture() {
    return std::move(last_capture_);
}

}  // namespace ipts::ua
