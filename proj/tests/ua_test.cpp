#include <doctest.h>

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ipts/media/audio.hpp"
#include "ipts/net/clock.hpp"
#include "ipts/net/event_loop.hpp"
#include "ipts/net/transport.hpp"
#include "ipts/sip/build.hpp"
#include "ipts/sip/digest.hpp"
#include "ipts/sip/sdp.hpp"
#include "ipts/txn/transaction.hpp"
#include "ipts/ua/softphone.hpp"

using namespace ipts;

namespace {

constexpr int64_t kBaseMs = 1'700'000'000'000;

const net::NetAddr kProxy{"127.0.0.1", 5060};

int g_branch_seq = 0;

std::string fresh_branch() { return "z9hG4bK-u" + std::to_string(++g_branch_seq); }

struct Rig {
    net::VirtualClock vclock{kBaseMs};
    net::TimerQueue timers{vclock};
    net::SteadyClock rt;
    net::EventLoop loop{rt};
    media::MediaEngine media;
    net::FakeTransport transport{{"127.0.0.1", 6001}};
    std::unique_ptr<ua::Softphone> phone;
    std::map<std::string, std::vector<sip::SipMessage>> inbox;
    std::vector<std::pair<std::string, std::string>> events;

    Rig() : media(loop, "127.0.0.1", media::PortAllocator(43000, 43998)) {
        ua::SoftphoneConfig cfg;
        cfg.ext = "2001";
        cfg.password = "pw2001";
        cfg.proxy = kProxy;
        cfg.local_port = 6001;
        cfg.ring_timeout_s = 2;
        cfg.register_expires_s = 300;
        cfg.tone_hz = 700.0;
        phone = std::make_unique<ua::Softphone>(transport, timers, vclock, media, cfg);
        phone->set_event_sink(
            [this](const std::string& ev, const std::string& d) { events.emplace_back(ev, d); });
    }

    void drain() {
        for (auto& [to, raw] : transport.sent) {
            auto parsed = sip::parse_message(raw);
            if (auto* rq = std::get_if<sip::SipRequest>(&parsed))
                inbox[to.to_string()].push_back(std::move(*rq));
            else if (auto* rs = std::get_if<sip::SipResponse>(&parsed))
                inbox[to.to_string()].push_back(std::move(*rs));
            else
                FAIL("phone emitted an unparseable message: ", raw.substr(0, 60));
        }
        transport.sent.clear();
    }

    void inject(const sip::SipMessage& msg) {
        transport.inject(kProxy, sip::serialize_message(msg));
        drain();
    }

    void advance(int64_t ms, int64_t step = 50) {
        for (int64_t t = 0; t < ms; t += step) {
            vclock.advance(step);
            timers.fire_due();
            drain();
        }
    }

    void pump(int64_t ms) {
        loop.run_for(ms);
        drain();
    }

    std::vector<sip::SipMessage> take() {
        drain();  // the phone initiates traffic on its own, not only on inject
        auto v = std::move(inbox[kProxy.to_string()]);
        inbox[kProxy.to_string()].clear();
        return v;
    }

    size_t count_event(const std::string& name) const {
        size_t n = 0;
        for (const auto& [ev, _] : events)
            if (ev == name) ++n;
        return n;
    }

    std::string last_detail(const std::string& name) const {
        for (auto it = events.rbegin(); it != events.rend(); ++it)
            if (it->first == name) return it->second;
        return "";
    }
};

std::vector<sip::SipRequest> requests_of(const std::vector<sip::SipMessage>& msgs,
                                         sip::SipMethod::Kind kind) {
    std::vector<sip::SipRequest> out;
    for (const auto& m : msgs)
        if (const auto* rq = std::get_if<sip::SipRequest>(&m))
            if (rq->method.kind() == kind) out.push_back(*rq);
    return out;
}

std::vector<sip::SipResponse> responses_of(const std::vector<sip::SipMessage>& msgs, int code) {
    std::vector<sip::SipResponse> out;
    for (const auto& m : msgs)
        if (const auto* rs = std::get_if<sip::SipResponse>(&m))
            if (rs->status.code == code) out.push_back(*rs);
    return out;
}

sip::SipResponse reply(const sip::SipRequest& req, int code, const std::string& to_tag = "",
                       const std::string& contact = "", uint16_t sdp_port = 0) {
    auto resp = sip::build_response(req, sip::StatusCode(code));
    if (!to_tag.empty()) resp.set_header("To", sip::with_tag(req.to_value(), to_tag));
    if (!contact.empty()) resp.set_header("Contact", contact);
    if (sdp_port != 0) {
        resp.set_header("Content-Type", "application/sdp");
        resp.body = sip::make_audio_sdp("127.0.0.1", sdp_port).to_string();
    }
    return resp;
}

sip::SipResponse challenge(const sip::SipRequest& req, int code, const std::string& nonce) {
    auto resp = sip::build_response(req, sip::StatusCode(code));
    sip::DigestChallenge ch;
    ch.realm = "pbx";
    ch.nonce = nonce;
    resp.set_header(code == 407 ? "Proxy-Authenticate" : "WWW-Authenticate",
                    ch.to_header_value());
    return resp;
}

sip::SipRequest invite_to_phone(const std::string& from_ext, const std::string& call_id,
                                uint16_t sdp_port, bool record_route = true) {
    sip::SipUri target{"sip", "2001", "127.0.0.1", 6001, {}};
    sip::Via via;
    via.host = kProxy.host;
    via.port = kProxy.port;
    via.params = {{"branch", fresh_branch()}};
    auto req = sip::RequestBuilder(sip::SipMethod::Invite, target)
                   .via(via)
                   .from(sip::name_addr(sip::SipUri{"sip", from_ext, "pbx", std::nullopt, {}},
                                        "tag-" + from_ext))
                   .to(sip::name_addr(sip::SipUri{"sip", "2001", "pbx", std::nullopt, {}}))
                   .call_id(call_id)
                   .cseq(1)
                   .contact("<sip:" + from_ext + "@127.0.0.1:6003>")
                   .sdp(sip::make_audio_sdp("127.0.0.1", sdp_port))
                   .build();
    if (record_route) req.add_header("Record-Route", "<sip:127.0.0.1:5060;lr>");
    return req;
}

// In-dialog request on a dialog the phone answered (we are the caller side).
sip::SipRequest peer_in_dialog(const sip::SipRequest& invite, const sip::SipResponse& ok200,
                               sip::SipMethod method, uint32_t cseq, const std::string& sdp = "") {
    auto contact = sip::uri_of(ok200.header("Contact").value_or(""));
    REQUIRE(contact.has_value());
    sip::Via via;
    via.host = kProxy.host;
    via.port = kProxy.port;
    via.params = {{"branch", fresh_branch()}};
    auto builder = sip::RequestBuilder(method, *contact)
                       .via(via)
                       .from(invite.from_value())
                       .to(ok200.to_value())
                       .call_id(invite.call_id())
                       .cseq(cseq, method)
                       .contact(invite.header("Contact").value_or(""));
    if (!sdp.empty()) builder.body("application/sdp", sdp);
    return builder.build();
}

void ack_phone_200(Rig& rig, const sip::SipRequest& invite, const sip::SipResponse& ok200) {
    rig.inject(peer_in_dialog(invite, ok200, sip::SipMethod::Ack,
                              invite.cseq() ? invite.cseq()->number : 1));
}

// Drives an incoming call up to the answered state; returns the INVITE and the
// phone's 200 so callers can continue the dialog.
struct IncomingCall {
    sip::SipRequest invite;
    sip::SipResponse ok;
};

IncomingCall establish_incoming(Rig& rig, uint16_t peer_port, const std::string& call_id) {
    IncomingCall in;
    in.invite = invite_to_phone("2003", call_id, peer_port);
    rig.inject(in.invite);
    REQUIRE(rig.phone->call_state() == ua::CallState::RingingIn);
    REQUIRE(rig.phone->do_answer().empty());
    auto oks = responses_of(rig.take(), 200);
    REQUIRE(oks.size() >= 1);
    in.ok = oks.back();
    ack_phone_200(rig, in.invite, in.ok);
    return in;
}

}  // namespace

TEST_CASE("registration authenticates and refreshes itself") {
    Rig rig;
    CHECK(rig.phone->command("register 2001 pw2001 127.0.0.1:5060").empty());
    CHECK(rig.phone->registration() == ua::RegState::Registering);

    auto regs = requests_of(rig.take(), sip::SipMethod::Register);
    REQUIRE(regs.size() == 1);
    CHECK(regs[0].request_uri.host == "pbx");
    CHECK(regs[0].request_uri.user.empty());
    CHECK(regs[0].header("Expires").value_or("") == "300");
    CHECK(regs[0].header("Contact").value_or("") == "<sip:2001@127.0.0.1:6001>");
    CHECK(!regs[0].has_header("Authorization"));

    rig.inject(challenge(regs[0], 401, "nonce-r1"));
    auto retried = requests_of(rig.take(), sip::SipMethod::Register);
    REQUIRE(retried.size() == 1);
    CHECK(retried[0].cseq()->number == regs[0].cseq()->number + 1);
    auto creds = sip::DigestCredentials::parse(retried[0].header("Authorization").value_or(""));
    REQUIRE(creds.has_value());
    CHECK(creds->username == "2001");
    const std::string want = sip::digest_response(sip::digest_ha1("2001", "pbx", "pw2001"),
                                                  "nonce-r1", "REGISTER", creds->uri);
    CHECK(creds->response == want);

    auto ok = reply(retried[0], 200, "tagR");
    ok.set_header("Contact", "<sip:2001@127.0.0.1:6001>;expires=300");
    rig.inject(ok);
    CHECK(rig.phone->registration() == ua::RegState::Registered);
    CHECK(rig.last_detail("registered") == "300");

    // Half the granted lifetime later the phone re-registers on its own.
    rig.advance(151'000, 500);
    auto refresh = requests_of(rig.take(), sip::SipMethod::Register);
    REQUIRE(refresh.size() >= 1);
    CHECK(refresh[0].cseq()->number == retried[0].cseq()->number + 1);
}

TEST_CASE("registration failure lands back in unregistered") {
    Rig rig;
    rig.phone->do_register();
    auto regs = requests_of(rig.take(), sip::SipMethod::Register);
    REQUIRE(regs.size() == 1);
    rig.inject(reply(regs[0], 403));
    CHECK(rig.phone->registration() == ua::RegState::Unregistered);
    CHECK(rig.last_detail("register_failed") == "403");
}

TEST_CASE("outgoing call: challenge, ring, answer, hold, hangup") {
    Rig rig;
    auto t2 = rig.media.create_session();
    REQUIRE(t2 != 0);

    CHECK(rig.phone->do_call("2002").empty());
    CHECK(rig.phone->call_state() == ua::CallState::RingingOut);
    auto invites = requests_of(rig.take(), sip::SipMethod::Invite);
    REQUIRE(invites.size() == 1);
    CHECK(invites[0].request_uri.user == "2002");
    CHECK(invites[0].request_uri.host == "pbx");
    auto offer = sip::SdpBody::parse(invites[0].body);
    REQUIRE(offer.has_value());

    rig.inject(challenge(invites[0], 407, "nonce-c1"));
    auto after = rig.take();
    CHECK(requests_of(after, sip::SipMethod::Ack).size() == 1);
    auto retried = requests_of(after, sip::SipMethod::Invite);
    REQUIRE(retried.size() == 1);
    CHECK(retried[0].cseq()->number == 2);
    auto creds =
        sip::DigestCredentials::parse(retried[0].header("Proxy-Authorization").value_or(""));
    REQUIRE(creds.has_value());
    const std::string want = sip::digest_response(sip::digest_ha1("2001", "pbx", "pw2001"),
                                                  "nonce-c1", "INVITE", creds->uri);
    CHECK(creds->response == want);

    rig.inject(reply(retried[0], 180));
    CHECK(rig.count_event("ringing") == 1);

    auto ok = reply(retried[0], 200, "tagB", "<sip:2002@127.0.0.1:6002>",
                    rig.media.session_port(t2));
    ok.set_header("Record-Route", "<sip:127.0.0.1:5060;lr>");
    rig.inject(ok);

    auto acks = requests_of(rig.take(), sip::SipMethod::Ack);
    REQUIRE(acks.size() == 1);
    CHECK(acks[0].cseq()->number == 2);
    CHECK(acks[0].request_uri.port.value_or(0) == 6002);
    CHECK(acks[0].header("Route").value_or("") == "<sip:127.0.0.1:5060;lr>");
    CHECK(rig.phone->call_state() == ua::CallState::Active);
    CHECK(rig.media.source_kind(rig.phone->main_session()) == media::SourceKind::Tone);
    CHECK(rig.media.session_remote(rig.phone->main_session()) ==
          net::NetAddr{"127.0.0.1", rig.media.session_port(t2)});
    CHECK(rig.last_detail("media").find("peer=127.0.0.1:") != std::string::npos);

    // Hold then resume, each a re-INVITE acknowledged on 200.
    CHECK(rig.phone->do_hold().empty());
    auto hold = requests_of(rig.take(), sip::SipMethod::Invite);
    REQUIRE(hold.size() == 1);
    CHECK(hold[0].cseq()->number == 3);
    CHECK(sip::SdpBody::parse(hold[0].body)->direction == sip::SdpDirection::SendOnly);
    rig.inject(reply(hold[0], 200, "", "", rig.media.session_port(t2)));
    CHECK(rig.phone->call_state() == ua::CallState::Held);
    CHECK(requests_of(rig.take(), sip::SipMethod::Ack).size() == 1);

    CHECK(rig.phone->do_unhold().empty());
    auto resume = requests_of(rig.take(), sip::SipMethod::Invite);
    REQUIRE(resume.size() == 1);
    CHECK(sip::SdpBody::parse(resume[0].body)->direction == sip::SdpDirection::SendRecv);
    rig.inject(reply(resume[0], 200, "", "", rig.media.session_port(t2)));
    CHECK(rig.phone->call_state() == ua::CallState::Active);
    rig.take();

    CHECK(rig.phone->do_dtmf('5').empty());

    CHECK(rig.phone->do_hangup().empty());
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
    auto byes = requests_of(rig.take(), sip::SipMethod::Bye);
    REQUIRE(byes.size() == 1);
    CHECK(byes[0].call_id() == invites[0].call_id());
    CHECK(byes[0].header("Route").value_or("") == "<sip:127.0.0.1:5060;lr>");
    rig.inject(reply(byes[0], 200));
    CHECK(rig.media.has_session(rig.phone->main_session()) == false);
}

TEST_CASE("rejected outgoing call reports the final") {
    Rig rig;
    rig.phone->do_call("93525550123");
    auto invites = requests_of(rig.take(), sip::SipMethod::Invite);
    REQUIRE(invites.size() == 1);
    rig.inject(reply(invites[0], 403));
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
    CHECK(rig.last_detail("call_failed") == "403 Forbidden");
    CHECK(requests_of(rig.take(), sip::SipMethod::Ack).size() == 1);
}

TEST_CASE("hangup while ringing out cancels") {
    Rig rig;
    rig.phone->do_call("2002");
    auto invites = requests_of(rig.take(), sip::SipMethod::Invite);
    REQUIRE(invites.size() == 1);
    rig.inject(reply(invites[0], 180));

    CHECK(rig.phone->do_hangup().empty());
    auto cancels = requests_of(rig.take(), sip::SipMethod::Cancel);
    REQUIRE(cancels.size() == 1);
    CHECK(cancels[0].top_via()->branch() == invites[0].top_via()->branch());
    CHECK(rig.phone->call_state() == ua::CallState::RingingOut);  // until the 487

    rig.inject(reply(cancels[0], 200));
    rig.inject(reply(invites[0], 487));
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
    CHECK(rig.count_event("hungup") == 1);
    CHECK(requests_of(rig.take(), sip::SipMethod::Ack).size() == 1);
}

TEST_CASE("incoming call rings, answers, survives peer hold, ends on bye") {
    Rig rig;
    auto t = rig.media.create_session();
    REQUIRE(t != 0);

    auto invite = invite_to_phone("2003", "in-1", rig.media.session_port(t));
    rig.inject(invite);
    auto provisionals = responses_of(rig.take(), 180);
    REQUIRE(provisionals.size() == 1);
    CHECK(sip::tag_of(provisionals[0].to_value()).empty());
    CHECK(rig.phone->call_state() == ua::CallState::RingingIn);
    CHECK(rig.last_detail("incoming") == "2003");

    REQUIRE(rig.phone->do_answer().empty());
    auto oks = responses_of(rig.take(), 200);
    REQUIRE(oks.size() == 1);
    auto sdp = sip::SdpBody::parse(oks[0].body);
    REQUIRE(sdp.has_value());
    CHECK(sdp->direction == sip::SdpDirection::SendRecv);
    CHECK(rig.phone->call_state() == ua::CallState::Active);
    ack_phone_200(rig, invite, oks[0]);

    // Audio flows both ways while the call is up.
    rig.media.set_remote(t, {"127.0.0.1", sdp->media_port});
    rig.media.set_source_tone(t, 500.0);
    rig.media.set_sink_record(t);
    rig.pump(300);
    CHECK(rig.media.stats(t).rx_audio_packets >= 8);
    CHECK(media::tone_present(rig.media.recorded(t), 700.0));

    auto hold_sdp = sip::make_audio_sdp("127.0.0.1", rig.media.session_port(t),
                                        sip::SdpDirection::SendOnly);
    rig.inject(peer_in_dialog(invite, oks[0], sip::SipMethod::Invite, 2, hold_sdp.to_string()));
    auto hold_ok = responses_of(rig.take(), 200);
    REQUIRE(hold_ok.size() == 1);
    CHECK(sip::SdpBody::parse(hold_ok[0].body)->direction == sip::SdpDirection::RecvOnly);
    CHECK(rig.count_event("peer_hold") == 1);
    rig.inject(peer_in_dialog(invite, oks[0], sip::SipMethod::Ack, 2));

    auto resume_sdp = sip::make_audio_sdp("127.0.0.1", rig.media.session_port(t));
    rig.inject(peer_in_dialog(invite, oks[0], sip::SipMethod::Invite, 3, resume_sdp.to_string()));
    rig.take();
    CHECK(rig.count_event("peer_resume") == 1);
    rig.inject(peer_in_dialog(invite, oks[0], sip::SipMethod::Ack, 3));

    rig.inject(peer_in_dialog(invite, oks[0], sip::SipMethod::Bye, 4));
    CHECK(responses_of(rig.take(), 200).size() == 1);
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
    CHECK(rig.count_event("bye") == 1);

    // The phone heard the peer's tone; the capture survives the teardown.
    auto capture = rig.phone->take_capture();
    CHECK(capture.size() >= 2000);
    CHECK(media::tone_present(capture, 500.0));
}

TEST_CASE("second incoming call is refused busy") {
    Rig rig;
    auto t = rig.media.create_session();
    REQUIRE(t != 0);
    establish_incoming(rig, rig.media.session_port(t), "busy-1");

    rig.inject(invite_to_phone("2004", "busy-2", 39000));
    CHECK(responses_of(rig.take(), 486).size() == 1);
    CHECK(rig.last_detail("rejected_busy") == "2004");
    CHECK(rig.phone->call_state() == ua::CallState::Active);
}

TEST_CASE("declining an incoming call sends 603") {
    Rig rig;
    rig.inject(invite_to_phone("2003", "dec-1", 39002));
    CHECK(rig.phone->call_state() == ua::CallState::RingingIn);
    CHECK(rig.phone->do_hangup().empty());
    CHECK(responses_of(rig.take(), 603).size() == 1);
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
    CHECK(rig.count_event("declined") == 1);
}

TEST_CASE("unanswered ring times out with 480") {
    Rig rig;
    rig.inject(invite_to_phone("2003", "to-1", 39004));
    CHECK(rig.phone->call_state() == ua::CallState::RingingIn);
    rig.advance(2200);
    CHECK(responses_of(rig.take(), 480).size() == 1);
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
    CHECK(rig.count_event("ring_timeout") == 1);
}

TEST_CASE("forward redirects the next call and clears again") {
    Rig rig;
    CHECK(rig.phone->command("forward 2005").empty());
    rig.inject(invite_to_phone("2003", "fwd-1", 39006));
    auto redirects = responses_of(rig.take(), 302);
    REQUIRE(redirects.size() == 1);
    CHECK(redirects[0].header("Contact").value_or("") == "<sip:2005@pbx>");
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
    CHECK(rig.last_detail("forwarded") == "2005");

    CHECK(rig.phone->command("forward off").empty());
    rig.inject(invite_to_phone("2003", "fwd-2", 39006));
    CHECK(responses_of(rig.take(), 180).size() == 1);
    CHECK(rig.phone->call_state() == ua::CallState::RingingIn);
}

TEST_CASE("caller cancel while ringing in") {
    Rig rig;
    auto invite = invite_to_phone("2003", "cin-1", 39008);
    rig.inject(invite);
    rig.take();
    rig.inject(txn::make_cancel(invite));
    auto out = rig.take();
    CHECK(responses_of(out, 200).size() == 1);
    CHECK(responses_of(out, 487).size() == 1);
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
    CHECK(rig.count_event("cancelled") == 1);
}

TEST_CASE("transfer re-originates and bridges, then tears both dialogs down") {
    Rig rig;
    auto t = rig.media.create_session();
    REQUIRE(t != 0);
    auto in = establish_incoming(rig, rig.media.session_port(t), "xf-1");
    auto main_sid = rig.phone->main_session();

    CHECK(rig.phone->do_transfer("2004").empty());
    auto invites = requests_of(rig.take(), sip::SipMethod::Invite);
    REQUIRE(invites.size() == 1);
    CHECK(invites[0].request_uri.user == "2004");
    CHECK(invites[0].call_id() != "xf-1");
    auto xfer_sdp = sip::SdpBody::parse(invites[0].body);
    REQUIRE(xfer_sdp.has_value());

    auto t2 = rig.media.create_session();
    rig.inject(reply(invites[0], 200, "tagX", "<sip:2004@127.0.0.1:6004>",
                     rig.media.session_port(t2)));
    CHECK(requests_of(rig.take(), sip::SipMethod::Ack).size() == 1);
    CHECK(rig.count_event("transferred") == 1);

    auto xfer_sid = rig.media.session_by_port(xfer_sdp->media_port);
    REQUIRE(xfer_sid != 0);
    CHECK(rig.media.relay_peer(main_sid) == xfer_sid);
    CHECK(rig.media.source_kind(main_sid) == media::SourceKind::None);

    CHECK(rig.phone->do_hangup().empty());
    auto byes = requests_of(rig.take(), sip::SipMethod::Bye);
    REQUIRE(byes.size() == 2);
    CHECK(byes[0].call_id() != byes[1].call_id());
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
}

TEST_CASE("remote bye after transfer clears the other dialog too") {
    Rig rig;
    auto t = rig.media.create_session();
    REQUIRE(t != 0);
    auto in = establish_incoming(rig, rig.media.session_port(t), "xf-2");

    rig.phone->do_transfer("2004");
    auto invites = requests_of(rig.take(), sip::SipMethod::Invite);
    REQUIRE(invites.size() == 1);
    rig.inject(reply(invites[0], 200, "tagX", "<sip:2004@127.0.0.1:6004>", 39010));
    rig.take();

    // The original caller hangs up; the phone must BYE the transfer target.
    rig.inject(peer_in_dialog(in.invite, in.ok, sip::SipMethod::Bye, 2));
    auto out = rig.take();
    CHECK(responses_of(out, 200).size() == 1);
    auto byes = requests_of(out, sip::SipMethod::Bye);
    REQUIRE(byes.size() == 1);
    CHECK(byes[0].call_id() == invites[0].call_id());
    CHECK(rig.phone->call_state() == ua::CallState::Idle);
}

TEST_CASE("failed transfer leaves the main call untouched") {
    Rig rig;
    auto t = rig.media.create_session();
    REQUIRE(t != 0);
    establish_incoming(rig, rig.media.session_port(t), "xf-3");

    rig.phone->do_transfer("2004");
    auto invites = requests_of(rig.take(), sip::SipMethod::Invite);
    REQUIRE(invites.size() == 1);
    rig.inject(reply(invites[0], 486));
    CHECK(rig.last_detail("transfer_failed") == "486");
    CHECK(rig.phone->call_state() == ua::CallState::Active);
    CHECK(rig.media.has_session(rig.phone->main_session()));
}

TEST_CASE("random command sequences never corrupt the state machine") {
    Rig rig;
    const std::vector<std::string> pool = {
        "register 2001 pw2001 127.0.0.1:5060",
        "register",
        "call 2002",
        "call",
        "answer",
        "hold",
        "unhold",
        "dtmf 5",
        "dtmf x",
        "transfer 2004",
        "forward 2005",
        "forward off",
        "hangup",
        "frobnicate",
        "",
    };
    std::mt19937 rng(20260823);
    for (int i = 0; i < 400; ++i) {
        const auto& line = pool[rng() % pool.size()];
        rig.phone->command(line);  // any result is fine, it must just not blow up
        if (rng() % 4 == 0) rig.advance(200);
        rig.take();

        const auto cs = rig.phone->call_state();
        if (cs == ua::CallState::Idle) CHECK(rig.phone->main_session() == 0);
        if (rig.phone->main_session() != 0)
            CHECK(rig.media.has_session(rig.phone->main_session()));
    }
}
