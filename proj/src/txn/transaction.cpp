#include "ipts/txn/transaction.hpp"

#include "ipts/util/log.hpp"

namespace ipts::txn {

using sip::SipMethod;
using sip::SipRequest;
using sip::SipResponse;

namespace {

std::string dialog_id_of(const sip::MessageBase& m) {
    auto cs = m.cseq();
    return m.call_id() + "|" + (cs ? std::to_string(cs->number) : "?");
}

std::optional<TxKey> key_of(const sip::MessageBase& m, const std::string& method) {
    auto via = m.top_via();
    if (!via) return std::nullopt;
    std::string branch = via->branch();
    if (branch.empty()) return std::nullopt;
    return TxKey{std::move(branch), method};
}

}  // namespace

TransactionEngine::TransactionEngine(net::Transport& transport, net::TimerQueue& timers,
                                     TimerConfig cfg)
    : transport_(transport), timers_(timers), cfg_(cfg) {
    transport_.set_recv_handler(
        [this](const net::NetAddr& from, std::string_view data) { on_data(from, data); });
}

void TransactionEngine::on_data(const net::NetAddr& from, std::string_view data) {
    auto parsed = sip::parse_message(data);
    if (std::holds_alternative<sip::ParseError>(parsed)) {
        if (on_bad_) on_bad_(std::get<sip::ParseError>(parsed), from, data);
        return;
    }
    if (std::holds_alternative<SipRequest>(parsed)) {
        auto& req = std::get<SipRequest>(parsed);
        if (req.method.is(SipMethod::Ack))
            on_ack(std::move(req), from);
        else
            on_request(std::move(req), from, data.size());
    } else {
        on_response(std::move(std::get<SipResponse>(parsed)), from);
    }
}

std::shared_ptr<ClientTransaction> TransactionEngine::send_request(
    SipRequest req, const net::NetAddr& dest, ClientTransaction::ResponseHandler on_response) {
    auto key = key_of(req, req.method.token());
    if (!key) {
        log::warn("txn: refusing to send request without a Via branch");
        return nullptr;
    }
    auto tx = std::make_shared<ClientTransaction>();
    tx->request_ = std::move(req);
    tx->dest_ = dest;
    tx->key_ = *key;
    tx->on_response_ = std::move(on_response);
    tx->interval_ms_ = cfg_.t1_ms;
    clients_[tx->key_] = tx;

    transport_.send(dest, sip::serialize_message(tx->request_));
    if (transport_.is_datagram()) {
        TxKey k = tx->key_;
        tx->retransmit_timer_ = timers_.add(tx->interval_ms_, [this, k] { client_retransmit(k); });
    }
    TxKey k = tx->key_;
    tx->lifetime_timer_ = timers_.add(cfg_.lifetime_ms, [this, k] { client_expire(k); });
    return tx;
}

void TransactionEngine::client_retransmit(const TxKey& key) {
    auto it = clients_.find(key);
    if (it == clients_.end()) return;
    auto& tx = *it->second;
    if (tx.got_provisional_ || tx.terminated_) return;
    transport_.send(tx.dest_, sip::serialize_message(tx.request_));
    tx.interval_ms_ = std::min(tx.interval_ms_ * 2, cfg_.retransmit_cap_ms);
    tx.retransmit_timer_ = timers_.add(tx.interval_ms_, [this, key] { client_retransmit(key); });
}

void TransactionEngine::client_expire(const TxKey& key) {
    auto it = clients_.find(key);
    if (it == clients_.end()) return;
    auto tx = it->second;
    auto timeout = sip::build_response(tx->request_, sip::StatusCode(408));
    terminate(*tx);
    if (tx->on_response_) tx->on_response_(timeout);
}

void TransactionEngine::on_response(SipResponse resp, const net::NetAddr& from) {
    auto cs = resp.cseq();
    auto key = cs ? key_of(resp, cs->method.token()) : std::nullopt;
    if (key) {
        auto it = clients_.find(*key);
        if (it != clients_.end()) {
            auto tx = it->second;
            auto cls = sip::classify_status(resp.status.code);
            if (cls == sip::StatusClass::Provisional) {
                tx->got_provisional_ = true;
                timers_.cancel(tx->retransmit_timer_);
                if (tx->on_response_) tx->on_response_(resp);
                return;
            }
            if (resp.status.code >= 300 && tx->request_.method.is(SipMethod::Invite))
                send_auto_ack(*tx, resp);
            auto handler = tx->on_response_;
            terminate(*tx);
            if (handler) handler(resp);
            return;
        }
    }
    if (on_stray_) on_stray_(resp, from);
}

void TransactionEngine::send_auto_ack(const ClientTransaction& tx, const SipResponse& final) {
    SipRequest ack;
    ack.method = SipMethod::Ack;
    ack.request_uri = tx.request_.request_uri;
    auto via = tx.request_.top_via();
    if (via) ack.headers.push_back({"Via", via->to_string()});
    ack.headers.push_back({"Max-Forwards", "70"});
    ack.headers.push_back({"From", tx.request_.from_value()});
    ack.headers.push_back({"To", final.to_value()});
    ack.headers.push_back({"Call-ID", tx.request_.call_id()});
    auto cs = tx.request_.cseq();
    ack.headers.push_back({"CSeq", std::to_string(cs ? cs->number : 0) + " ACK"});
    transport_.send(tx.dest_, sip::serialize_message(ack));
}

void TransactionEngine::on_request(SipRequest req, const net::NetAddr& from, size_t wire_size) {
    auto key = key_of(req, req.method.token());
    if (!key) {
        if (on_request_) on_request_(req, nullptr);
        return;
    }
    auto it = servers_.find(*key);
    if (it != servers_.end()) {
        auto& tx = *it->second;
        if (!tx.last_response_.empty()) transport_.send(tx.peer_, tx.last_response_);
        return;  // retransmission, absorbed
    }
    auto tx = std::make_shared<ServerTransaction>();
    tx->engine_ = this;
    tx->request_ = std::move(req);
    tx->peer_ = from;
    tx->key_ = *key;
    tx->wire_size_ = wire_size;
    tx->dialog_id_ = dialog_id_of(tx->request_);
    servers_[tx->key_] = tx;
    TxKey k = tx->key_;
    tx->lifetime_timer_ = timers_.add(cfg_.lifetime_ms, [this, k] { server_expire(k); });
    if (on_request_) on_request_(tx->request_, tx);
}

void TransactionEngine::on_ack(SipRequest ack, const net::NetAddr& from) {
    std::string did = dialog_id_of(ack);
    for (auto& [key, tx] : servers_) {
        if (tx->request_.method.is(SipMethod::Invite) && tx->dialog_id_ == did &&
            tx->completed_ && !tx->acked_) {
            tx->acked_ = true;
            timers_.cancel(tx->retransmit_timer_);
            auto keep = tx;  // terminate erases from the map we are iterating
            terminate(*keep);
            break;
        }
    }
    if (on_ack_) on_ack_(ack, from);
}

void ServerTransaction::respond(const SipResponse& resp) {
    if (!engine_ || terminated_) return;
    last_response_ = sip::serialize_message(resp);
    engine_->transport_.send(peer_, last_response_);
    auto cls = sip::classify_status(resp.status.code);
    if (cls == sip::StatusClass::Provisional) return;
    completed_ = true;
    if (request_.method.is(SipMethod::Invite) && engine_->transport_.is_datagram()) {
        // final repeats until the ACK lands, 2xx included
        interval_ms_ = engine_->cfg_.t1_ms;
        TxKey k = key_;
        TransactionEngine* eng = engine_;
        retransmit_timer_ = eng->timers_.add(interval_ms_, [eng, k] { eng->server_retransmit(k); });
    } else if (!request_.method.is(SipMethod::Invite)) {
        // linger to absorb retransmits; the lifetime timer reaps it
    }
}

void TransactionEngine::server_retransmit(const TxKey& key) {
    auto it = servers_.find(key);
    if (it == servers_.end()) return;
    auto& tx = *it->second;
    if (tx.acked_ || tx.terminated_) return;
    transport_.send(tx.peer_, tx.last_response_);
    tx.interval_ms_ = std::min(tx.interval_ms_ * 2, cfg_.retransmit_cap_ms);
    tx.retransmit_timer_ = timers_.add(tx.interval_ms_, [this, key] { server_retransmit(key); });
}

void TransactionEngine::server_expire(const TxKey& key) {
    auto it = servers_.find(key);
    if (it == servers_.end()) return;
    auto tx = it->second;
    terminate(*tx);
}

std::shared_ptr<ServerTransaction> TransactionEngine::find_invite_by_branch(
    const std::string& branch) {
    auto it = servers_.find(TxKey{branch, "INVITE"});
    if (it == servers_.end() || it->second->terminated_) return nullptr;
    return it->second;
}

bool TransactionEngine::stateless_send(const sip::SipMessage& msg, const net::NetAddr& dest) {
    return transport_.send(dest, sip::serialize_message(msg));
}

void TransactionEngine::terminate(ClientTransaction& tx) {
    if (tx.terminated_) return;
    tx.terminated_ = true;
    timers_.cancel(tx.retransmit_timer_);
    timers_.cancel(tx.lifetime_timer_);
    clients_.erase(tx.key_);
}

void TransactionEngine::terminate(ServerTransaction& tx) {
    if (tx.terminated_) return;
    tx.terminated_ = true;
    timers_.cancel(tx.retransmit_timer_);
    timers_.cancel(tx.lifetime_timer_);
    servers_.erase(tx.key_);
}

SipRequest make_cancel(const SipRequest& invite) {
    SipRequest cancel;
    cancel.method = SipMethod::Cancel;
    cancel.request_uri = invite.request_uri;
    auto via = invite.top_via();
    if (via) cancel.headers.push_back({"Via", via->to_string()});
    cancel.headers.push_back({"Max-Forwards", "70"});
    cancel.headers.push_back({"From", invite.from_value()});
    cancel.headers.push_back({"To", invite.to_value()});
    cancel.headers.push_back({"Call-ID", invite.call_id()});
    auto cs = invite.cseq();
    cancel.headers.push_back({"CSeq", std::to_string(cs ? cs->number : 0) + " CANCEL"});
    return cancel;
}

}  // namespace ipts::txn
