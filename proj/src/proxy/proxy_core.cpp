#include "ipts/proxy/proxy_core.hpp"

#include <algorithm>

#include "ipts/sip/build.hpp"
#include "ipts/sip/ids.hpp"
#include "ipts/sip/sdp.hpp"
#include "ipts/util/log.hpp"

namespace ipts::proxy {

using sip::SipMethod;
using sip::SipRequest;
using sip::SipResponse;
using sip::StatusCode;

ProxyCore::ProxyCore(net::Transport& transport, net::TimerQueue& timers, const net::Clock& clock,
                     reg::LocationStore& store, ProxyConfig cfg)
    : timers_(timers),
      clock_(clock),
      store_(store),
      cfg_(std::move(cfg)),
      registrar_(store, cfg_.realm, clock),
      engine_(transport, timers) {
    if (!cfg_.cdr_path.empty()) cdr_ = std::make_unique<CdrWriter>(cfg_.cdr_path);
    engine_.set_request_handler([this](const SipRequest& req, auto stx) {
        if (stx) on_request(req, std::move(stx));
    });
    engine_.set_ack_handler(
        [this](const SipRequest& ack, const net::NetAddr& from) { on_ack(ack, from); });
    engine_.set_stray_response_handler(
        [this](const SipResponse& resp, const net::NetAddr& from) {
            on_stray_response(resp, from);
        });
    engine_.set_bad_message_handler(
        [](const sip::ParseError& err, const net::NetAddr& from, std::string_view) {
            log::warn("dropping unparseable message from ", from.to_string(), ": ", err.detail);
        });
}

void ProxyCore::poll() {
    store_.poll_journal();
    store_.expire_bindings(now_ms() / 1000);
}

// ---- ingress ----

void ProxyCore::on_request(const SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx) {
    if (auto code = sanity_check(req, stx->wire_size(), cfg_)) {
        stx->respond(sip::build_response(req, StatusCode(code->code)));
        return;
    }
    switch (req.method.kind()) {
        case SipMethod::Register:
            stx->respond(registrar_.handle_register(req));
            return;
        case SipMethod::Options:
            stx->respond(sip::build_response(req, StatusCode(200)));
            return;
        case SipMethod::Cancel:
            handle_cancel(req, std::move(stx));
            return;
        case SipMethod::Invite:
            if (sip::tag_of(req.to_value()).empty())
                start_call(req, std::move(stx));
            else
                in_dialog_request(req, std::move(stx));
            return;
        case SipMethod::Bye:
            in_dialog_request(req, std::move(stx));
            return;
        default:
            if (calls_.count(req.call_id()))
                in_dialog_request(req, std::move(stx));
            else
                stx->respond(sip::build_response(req, StatusCode(501)));
            return;
    }
}

void ProxyCore::on_ack(const SipRequest& ack, const net::NetAddr&) {
    auto it = calls_.find(ack.call_id());
    if (it == calls_.end()) return;
    const auto& call = it->second;
    // ACK for a locally produced failure is hop-by-hop and stops here; the ACK
    // completing the answered dialog travels end-to-end to the winning leg.
    if (!call->answered || call->winner < 0) return;
    if (!is_from_caller(call, ack)) return;
    SipRequest fwd = relay_copy(ack);
    fwd.request_uri = call->callee_contact;
    engine_.stateless_send(fwd, call->callee_addr);
}

void ProxyCore::on_stray_response(const SipResponse& resp, const net::NetAddr&) {
    // Late or retransmitted responses whose transaction is gone relay down the
    // Via stack like any proxy would; ours on top means it was meant for us.
    auto top = resp.top_via();
    if (!top || top->host != cfg_.listen_host || top->port != cfg_.listen_port) return;
    SipResponse fwd = resp;
    fwd.pop_via();
    auto next = fwd.top_via();
    if (!next) return;
    engine_.stateless_send(fwd, {next->host, next->port});
}

// ---- new calls ----

void ProxyCore::start_call(const SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx) {
    reg::Subscriber caller;
    if (stx->peer() == cfg_.b2bua_addr) {
        // The b2bua is a trusted peer; calls it originates carry no digest.
        auto from_uri = sip::uri_of(req.from_value());
        caller.extension = from_uri ? from_uri->user : "trunk";
        caller.privilege = reg::Privilege::External;
    } else {
        switch (registrar_.authenticate(req, /*proxy_flavor=*/true)) {
            case reg::AuthResult::Ok:
                break;
            case reg::AuthResult::StaleNonce:
                stx->respond(registrar_.challenge(req, true, /*stale=*/true));
                return;
            default:
                stx->respond(registrar_.challenge(req, true, /*stale=*/false));
                return;
        }
        auto creds = sip::DigestCredentials::parse(
            req.header("Proxy-Authorization").value_or(""));
        const auto* sub = creds ? store_.find_subscriber(creds->username) : nullptr;
        if (!sub) {
            stx->respond(sip::build_response(req, StatusCode(403)));
            return;
        }
        caller = *sub;
    }

    auto call = std::make_shared<Call>();
    call->call_id = req.call_id();
    call->invite = req;
    call->server_tx = stx;
    call->caller_addr = stx->peer();
    call->caller_tag = sip::tag_of(req.from_value());
    call->caller_sub = caller;
    call->dialed = req.request_uri.user;
    if (auto contact = sip::uri_of(req.header("Contact").value_or("")))
        call->caller_contact = *contact;
    else
        call->caller_contact = sip::SipUri{"sip", caller.extension, stx->peer().host,
                                           stx->peer().port, {}};
    note_media(call, /*from_caller=*/true, req.body);

    call->cdr.call_id = call->call_id;
    call->cdr.caller = aor_uri(caller.extension, cfg_.realm).to_string();
    call->cdr.callee = req.request_uri.to_string();
    call->cdr.start_ms = now_ms();

    calls_[call->call_id] = call;
    auto decision = route(call->dialed, caller, store_, cfg_, now_ms() / 1000);
    dispatch_decision(call, decision);
    if (call->finished || call->answered) return;

    stx->respond(sip::build_response(req, StatusCode(100)));
    call->no_answer_timer = timers_.add(cfg_.no_answer_ms, [this, id = call->call_id] {
        on_no_answer(id);
    });
}

void ProxyCore::dispatch_decision(const CallPtr& call, const RoutingDecision& decision) {
    if (const auto* internal = std::get_if<RouteInternal>(&decision)) {
        for (const auto& binding : internal->contacts)
            add_branch(call, binding.contact,
                       {binding.contact.host, binding.contact.port_or_default()});
        return;
    }
    if (const auto* ext = std::get_if<RouteExternal>(&decision)) {
        call->via_b2bua = true;
        sip::SipUri uri = call->invite.request_uri;
        uri.user = cfg_.external_prefix + ext->trunk_digits;
        add_branch(call, uri, cfg_.b2bua_addr);
        return;
    }
    if (const auto* feat = std::get_if<RouteFeature>(&decision)) {
        call->via_b2bua = true;
        sip::SipUri uri = call->invite.request_uri;
        uri.params.clear();
        switch (feat->kind) {
            case FeatureKind::Conference: uri.user = feat->arg; break;
            case FeatureKind::Ivr: uri.user = cfg_.ivr_ext; break;
            case FeatureKind::Moh: uri.user = cfg_.moh_ext; break;
            case FeatureKind::Voicemail:
                uri.user = cfg_.voicemail_ext;
                if (!feat->arg.empty()) uri.with_param("target", feat->arg);
                break;
        }
        add_branch(call, uri, cfg_.b2bua_addr);
        return;
    }
    const auto& reject = std::get<RouteReject>(decision);
    auto resp = sip::build_response(call->invite, StatusCode(reject.status.code));
    finish_call(call, resp, reject.status.code == 486 ? Disposition::Busy : Disposition::Failed);
}

void ProxyCore::add_branch(const CallPtr& call, const sip::SipUri& target,
                           const net::NetAddr& dest) {
    SipRequest fwd = relay_copy(call->invite);
    fwd.request_uri = target;
    fwd.set_header("Record-Route", record_route_value());
    const size_t index = call->branches.size();
    auto tx = engine_.send_request(fwd, dest,
                                   [this, id = call->call_id, index](const SipResponse& resp) {
                                       on_branch_response(id, index, resp);
                                   });
    call->branches.push_back({std::move(tx), dest, false, std::nullopt});
}

void ProxyCore::on_branch_response(const std::string& call_id, size_t index,
                                   const SipResponse& resp) {
    auto it = calls_.find(call_id);
    if (it == calls_.end()) return;
    auto call = it->second;
    if (index >= call->branches.size()) return;
    auto& branch = call->branches[index];
    const int code = resp.status.code;

    if (code < 200) {
        // Pass ringing upward; duplicates across branches are harmless.
        if (!call->answered && !call->finished && code != 100) {
            SipResponse fwd = resp;
            fwd.pop_via();
            call->server_tx->respond(fwd);
        }
        return;
    }

    branch.final = resp.status;

    if (code < 300) {
        if (call->answered || call->finished || branch.cancelled) {
            // Lost the race after we committed elsewhere: close this dialog.
            ack_response(resp, branch.dest);
            bye_dialog(resp, branch.dest);
            return;
        }
        on_branch_win(call, index, resp);
        return;
    }

    if (code < 400 && !call->redirect_spent && !call->cancel_requested && !call->answered) {
        follow_redirect(call, resp);
        return;
    }

    maybe_finish_failed(call);
}

void ProxyCore::on_branch_win(const CallPtr& call, size_t index, const SipResponse& resp) {
    call->answered = true;
    call->winner = static_cast<int>(index);
    call->cdr.answer_ms = now_ms();
    if (call->no_answer_timer) {
        timers_.cancel(call->no_answer_timer);
        call->no_answer_timer = 0;
    }
    cancel_pending_branches(call);

    auto& branch = call->branches[index];
    call->callee_addr = branch.dest;
    if (auto contact = sip::uri_of(resp.header("Contact").value_or("")))
        call->callee_contact = *contact;
    else
        call->callee_contact = branch.tx->request().request_uri;
    note_media(call, /*from_caller=*/false, resp.body);

    SipResponse fwd = resp;
    fwd.pop_via();
    call->server_tx->respond(fwd);
}

void ProxyCore::follow_redirect(const CallPtr& call, const SipResponse& resp) {
    call->redirect_spent = true;
    auto contact = sip::uri_of(resp.header("Contact").value_or(""));
    if (!contact) {
        maybe_finish_failed(call);
        return;
    }
    log::info("following redirect for ", call->call_id, " to ", contact->to_string());
    if (contact->host == cfg_.realm) {
        // Contact names an extension, so it goes through routing like a fresh
        // dial; anything else is taken as a directly reachable device.
        dispatch_decision(call,
                          route(contact->user, call->caller_sub, store_, cfg_, now_ms() / 1000));
    } else {
        add_branch(call, *contact, {contact->host, contact->port_or_default()});
    }
}

void ProxyCore::cancel_pending_branches(const CallPtr& call) {
    for (auto& branch : call->branches) {
        if (branch.final || branch.cancelled) continue;
        branch.cancelled = true;
        engine_.send_request(txn::make_cancel(branch.tx->request()), branch.dest,
                             [](const SipResponse&) {});
    }
}

void ProxyCore::maybe_finish_failed(const CallPtr& call) {
    if (call->answered || call->finished) return;
    std::vector<StatusCode> finals;
    for (const auto& branch : call->branches) {
        if (!branch.final) return;  // still waiting
        finals.push_back(*branch.final);
    }
    if (finals.empty()) return;
    const auto best = best_final_response(finals);

    Disposition d = Disposition::Failed;
    if (call->cancel_requested)
        d = Disposition::Cancelled;
    else if (best.code == 486)
        d = Disposition::Busy;
    else if (best.code == 480 || best.code == 408 || best.code == 487)
        d = Disposition::NoAnswer;
    finish_call(call, sip::build_response(call->invite, StatusCode(best.code)), d);
}

void ProxyCore::on_no_answer(const std::string& call_id) {
    auto it = calls_.find(call_id);
    if (it == calls_.end()) return;
    auto call = it->second;
    call->no_answer_timer = 0;
    if (call->answered || call->finished) return;
    cancel_pending_branches(call);
    const bool can_vm = !call->via_b2bua && !call->rerouted_to_vm &&
                        store_.find_subscriber(call->dialed) != nullptr;
    if (!can_vm) {
        finish_call(call, sip::build_response(call->invite, StatusCode(480)),
                    Disposition::NoAnswer);
        return;
    }
    log::info("no answer from ", call->dialed, ", diverting ", call_id, " to voicemail");
    call->rerouted_to_vm = true;
    call->via_b2bua = true;
    sip::SipUri uri = call->invite.request_uri;
    uri.params.clear();
    uri.user = cfg_.voicemail_ext;
    uri.with_param("target", call->dialed);
    add_branch(call, uri, cfg_.b2bua_addr);
}

// ---- cancel / in-dialog ----

void ProxyCore::handle_cancel(const SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx) {
    auto it = calls_.find(req.call_id());
    if (it == calls_.end()) {
        stx->respond(sip::build_response(req, StatusCode(481)));
        return;
    }
    stx->respond(sip::build_response(req, StatusCode(200)));
    auto call = it->second;
    if (call->answered || call->finished) return;
    call->cancel_requested = true;
    if (call->no_answer_timer) {
        timers_.cancel(call->no_answer_timer);
        call->no_answer_timer = 0;
    }
    cancel_pending_branches(call);
    // The cancelled legs answer 487 and maybe_finish_failed relays the result.
}

void ProxyCore::in_dialog_request(const SipRequest& req,
                                  std::shared_ptr<txn::ServerTransaction> stx) {
    auto it = calls_.find(req.call_id());
    if (it == calls_.end()) {
        stx->respond(sip::build_response(req, StatusCode(481)));
        return;
    }
    auto call = it->second;

    if (req.method.kind() == SipMethod::Bye && !call->answered) {
        // Caller abandoning before answer; treat like CANCEL and close out.
        stx->respond(sip::build_response(req, StatusCode(200)));
        call->cancel_requested = true;
        cancel_pending_branches(call);
        if (!call->finished)
            finish_call(call, sip::build_response(call->invite, StatusCode(487)),
                        Disposition::Cancelled);
        return;
    }

    const bool from_caller = is_from_caller(call, req);

    if (req.method.kind() == SipMethod::Invite) {
        const bool hold = sip::sdp_signals_hold(req.body);
        if (!hold) note_media(call, from_caller, req.body);
        if (!call->via_b2bua) {
            // Phone-to-phone hold: the proxy supplies hold music by running
            // its own leg to the media server, aimed at the held party.
            const auto holder = from_caller ? HoldState::ByCaller : HoldState::ByCallee;
            if (hold && call->hold == HoldState::None) {
                call->hold = holder;
                if (from_caller)
                    start_moh(call, call->callee_media_host, call->callee_media_port);
                else
                    start_moh(call, call->caller_media_host, call->caller_media_port);
            } else if (!hold && call->hold == holder) {
                call->hold = HoldState::None;
                stop_moh(call);
            }
        }
    }

    SipRequest fwd = relay_copy(req);
    fwd.request_uri = from_caller ? call->callee_contact : call->caller_contact;
    const auto dest = from_caller ? call->callee_addr : call->caller_addr;
    const bool is_bye = req.method.kind() == SipMethod::Bye;
    engine_.send_request(
        fwd, dest,
        [this, id = req.call_id(), stx, is_bye](const SipResponse& resp) {
            SipResponse up = resp;
            up.pop_via();
            stx->respond(up);
            if (!is_bye || resp.status.code < 200) return;
            auto cit = calls_.find(id);
            if (cit == calls_.end()) return;
            auto ended = cit->second;
            stop_moh(ended);
            ended->cdr.end_ms = now_ms();
            write_cdr(ended, Disposition::Answered);
            calls_.erase(cit);
        });
}

// ---- music on hold leg ----

void ProxyCore::start_moh(const CallPtr& call, const std::string& held_host,
                          uint16_t held_port) {
    if (call->moh || held_host.empty() || held_port == 0) return;
    MohLeg leg;
    leg.call_id = sip::gen_call_id(cfg_.listen_host);
    leg.local_tag = sip::gen_tag();
    leg.remote_target = aor_uri(cfg_.moh_ext, cfg_.realm);
    call->moh = leg;

    auto offer = sip::make_audio_sdp(held_host, held_port, sip::SdpDirection::RecvOnly);
    auto invite =
        sip::RequestBuilder(SipMethod::Invite, aor_uri(cfg_.moh_ext, cfg_.realm))
            .via(own_via())
            .from(sip::name_addr(aor_uri("proxy", cfg_.realm), leg.local_tag))
            .to(sip::name_addr(aor_uri(cfg_.moh_ext, cfg_.realm)))
            .call_id(leg.call_id)
            .cseq(1)
            .contact(sip::name_addr(
                sip::SipUri{"sip", "proxy", cfg_.listen_host, cfg_.listen_port, {}}))
            .max_forwards(cfg_.max_forwards_default)
            .sdp(offer)
            .build();
    engine_.send_request(
        invite, cfg_.b2bua_addr, [this, id = call->call_id](const SipResponse& resp) {
            auto it = calls_.find(id);
            if (it == calls_.end() || !it->second->moh) {
                if (resp.status.code < 300) {
                    // Call went away while the leg was setting up.
                    ack_response(resp, cfg_.b2bua_addr);
                    bye_dialog(resp, cfg_.b2bua_addr);
                }
                return;
            }
            auto& leg = *it->second->moh;
            if (resp.status.code >= 300) {
                log::warn("music-on-hold leg failed with ", resp.status.code);
                it->second->moh.reset();
                return;
            }
            leg.established = true;
            leg.remote_tag = sip::tag_of(resp.to_value());
            if (auto contact = sip::uri_of(resp.header("Contact").value_or("")))
                leg.remote_target = *contact;
            ack_response(resp, cfg_.b2bua_addr);
            if (leg.teardown_requested) stop_moh(it->second);
        });
}

void ProxyCore::stop_moh(const CallPtr& call) {
    if (!call->moh) return;
    auto& leg = *call->moh;
    if (!leg.established) {
        leg.teardown_requested = true;
        return;
    }
    auto bye = sip::RequestBuilder(SipMethod::Bye, leg.remote_target)
                   .via(own_via())
                   .from(sip::name_addr(aor_uri("proxy", cfg_.realm), leg.local_tag))
                   .to(sip::name_addr(aor_uri(cfg_.moh_ext, cfg_.realm), leg.remote_tag))
                   .call_id(leg.call_id)
                   .cseq(++leg.cseq, SipMethod::Bye)
                   .max_forwards(cfg_.max_forwards_default)
                   .build();
    engine_.send_request(bye, cfg_.b2bua_addr, [](const SipResponse&) {});
    call->moh.reset();
}

void ProxyCore::ack_response(const SipResponse& resp, const net::NetAddr& dest) {
    auto cseq = resp.cseq();
    if (!cseq) return;
    sip::SipUri target{"sip", "", dest.host, dest.port, {}};
    if (auto contact = sip::uri_of(resp.header("Contact").value_or(""))) target = *contact;
    auto ack = sip::RequestBuilder(SipMethod::Ack, target)
                   .via(own_via())
                   .from(resp.from_value())
                   .to(resp.to_value())
                   .call_id(resp.call_id())
                   .cseq(cseq->number, SipMethod::Ack)
                   .max_forwards(cfg_.max_forwards_default)
                   .build();
    engine_.stateless_send(ack, dest);
}

void ProxyCore::bye_dialog(const SipResponse& resp, const net::NetAddr& dest) {
    auto cseq = resp.cseq();
    if (!cseq) return;
    sip::SipUri target{"sip", "", dest.host, dest.port, {}};
    if (auto contact = sip::uri_of(resp.header("Contact").value_or(""))) target = *contact;
    auto bye = sip::RequestBuilder(SipMethod::Bye, target)
                   .via(own_via())
                   .from(resp.from_value())
                   .to(resp.to_value())
                   .call_id(resp.call_id())
                   .cseq(cseq->number + 1, SipMethod::Bye)
                   .max_forwards(cfg_.max_forwards_default)
                   .build();
    engine_.send_request(bye, dest, [](const SipResponse&) {});
}

// ---- bookkeeping ----

void ProxyCore::write_cdr(const CallPtr& call, Disposition d) {
    if (call->cdr_written) return;
    call->cdr_written = true;
    call->cdr.disposition = d;
    if (call->cdr.end_ms == 0) call->cdr.end_ms = now_ms();
    if (cdr_) cdr_->append(call->cdr);
    log::info("cdr ", call->call_id, " ", to_string(d), " duration ",
              call->cdr.duration_ms(), "ms");
}

void ProxyCore::finish_call(const CallPtr& call, const SipResponse& upstream, Disposition d) {
    call->finished = true;
    if (call->no_answer_timer) {
        timers_.cancel(call->no_answer_timer);
        call->no_answer_timer = 0;
    }
    call->server_tx->respond(upstream);
    call->cdr.end_ms = now_ms();
    write_cdr(call, d);
    stop_moh(call);
    drop_call_later(call->call_id, engine_.config().lifetime_ms);
}

void ProxyCore::drop_call_later(const std::string& call_id, int64_t delay_ms) {
    timers_.add(delay_ms, [this, call_id] { calls_.erase(call_id); });
}

void ProxyCore::note_media(const CallPtr& call, bool from_caller, const std::string& body) {
    if (body.empty()) return;
    auto sdp = sip::SdpBody::parse(body);
    if (!sdp || sdp->connection_address.empty() || sdp->connection_address == "0.0.0.0" ||
        sdp->media_port == 0)
        return;
    if (from_caller) {
        call->caller_media_host = sdp->connection_address;
        call->caller_media_port = sdp->media_port;
    } else {
        call->callee_media_host = sdp->connection_address;
        call->callee_media_port = sdp->media_port;
    }
}

sip::Via ProxyCore::own_via() const {
    sip::Via via;
    via.host = cfg_.listen_host;
    via.port = cfg_.listen_port;
    via.params.emplace_back("branch", sip::gen_branch());
    return via;
}

std::string ProxyCore::record_route_value() const {
    return "<sip:" + cfg_.listen_host + ":" + std::to_string(cfg_.listen_port) + ";lr>";
}

SipRequest ProxyCore::relay_copy(const SipRequest& req) const {
    SipRequest fwd = req;
    const int hops = req.max_forwards().value_or(cfg_.max_forwards_default);
    fwd.set_header("Max-Forwards", std::to_string(hops - 1));
    fwd.push_via(own_via());
    return fwd;
}

bool ProxyCore::is_from_caller(const CallPtr& call, const SipRequest& req) const {
    return sip::tag_of(req.from_value()) == call->caller_tag;
}

}  // namespace ipts::proxy
