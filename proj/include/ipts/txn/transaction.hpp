#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "ipts/net/addr.hpp"
#include "ipts/net/timer_queue.hpp"
#include "ipts/net/transport.hpp"
#include "ipts/sip/message.hpp"

namespace ipts::txn {

struct TimerConfig {
    int64_t t1_ms = 500;            // initial retransmit interval
    int64_t retransmit_cap_ms = 4000;
    int64_t lifetime_ms = 32000;    // transaction give-up point
};

// Branch plus CSeq method distinguishes a CANCEL from the INVITE it targets.
struct TxKey {
    std::string branch;
    std::string method;
    bool operator<(const TxKey& o) const {
        return branch != o.branch ? branch < o.branch : method < o.method;
    }
};

class TransactionEngine;

class ClientTransaction {
public:
    using ResponseHandler = std::function<void(const sip::SipResponse&)>;

    const sip::SipRequest& request() const { return request_; }
    const net::NetAddr& destination() const { return dest_; }
    const std::string& branch() const { return key_.branch; }
    bool terminated() const { return terminated_; }

private:
    friend class TransactionEngine;
    sip::SipRequest request_;
    net::NetAddr dest_;
    TxKey key_;
    ResponseHandler on_response_;
    net::TimerQueue::TimerId retransmit_timer_ = 0;
    net::TimerQueue::TimerId lifetime_timer_ = 0;
    int64_t interval_ms_ = 0;
    bool got_provisional_ = false;
    bool terminated_ = false;
};

class ServerTransaction {
public:
    const sip::SipRequest& request() const { return request_; }
    const net::NetAddr& peer() const { return peer_; }
    const std::string& branch() const { return key_.branch; }
    size_t wire_size() const { return wire_size_; }
    bool responded() const { return !last_response_.empty(); }
    bool completed() const { return completed_; }
    bool terminated() const { return terminated_; }

    // Sends through the engine; a final response starts absorb/retransmit duty.
    void respond(const sip::SipResponse& resp);

private:
    friend class TransactionEngine;
    TransactionEngine* engine_ = nullptr;
    sip::SipRequest request_;
    net::NetAddr peer_;
    TxKey key_;
    size_t wire_size_ = 0;
    std::string last_response_;     // wire form, replayed on request retransmits
    std::string dialog_id_;         // Call-ID + CSeq number, for ACK matching
    net::TimerQueue::TimerId retransmit_timer_ = 0;
    net::TimerQueue::TimerId lifetime_timer_ = 0;
    int64_t interval_ms_ = 0;
    bool completed_ = false;
    bool acked_ = false;
    bool terminated_ = false;
};

// Hop-by-hop request/response matching over one transport. Owns retransmission
// on datagram links, absorbs duplicates, and synthesizes 408 when a client
// transaction runs out its lifetime. Single-threaded; drive via the timer queue.
class TransactionEngine {
public:
    using RequestHandler =
        std::function<void(const sip::SipRequest&, std::shared_ptr<ServerTransaction>)>;
    using AckHandler = std::function<void(const sip::SipRequest&, const net::NetAddr&)>;
    using StrayResponseHandler =
        std::function<void(const sip::SipResponse&, const net::NetAddr&)>;
    using BadMessageHandler =
        std::function<void(const sip::ParseError&, const net::NetAddr&, std::string_view raw)>;

    TransactionEngine(net::Transport& transport, net::TimerQueue& timers, TimerConfig cfg = {});

    void set_request_handler(RequestHandler h) { on_request_ = std::move(h); }
    void set_ack_handler(AckHandler h) { on_ack_ = std::move(h); }
    void set_stray_response_handler(StrayResponseHandler h) { on_stray_ = std::move(h); }
    void set_bad_message_handler(BadMessageHandler h) { on_bad_ = std::move(h); }

    std::shared_ptr<ClientTransaction> send_request(sip::SipRequest req, const net::NetAddr& dest,
                                                    ClientTransaction::ResponseHandler on_response);

    // No transaction state: ACK, forwarded responses, stateless proxying.
    bool stateless_send(const sip::SipMessage& msg, const net::NetAddr& dest);

    // The INVITE a CANCEL with this branch aims at, if still answerable.
    std::shared_ptr<ServerTransaction> find_invite_by_branch(const std::string& branch);

    size_t table_size() const { return clients_.size() + servers_.size(); }
    net::Transport& transport() { return transport_; }
    const TimerConfig& config() const { return cfg_; }

    // Transport ingress; public so tests can feed raw bytes directly.
    void on_data(const net::NetAddr& from, std::string_view data);

private:
    friend class ServerTransaction;

    void on_request(sip::SipRequest req, const net::NetAddr& from, size_t wire_size);
    void on_response(sip::SipResponse resp, const net::NetAddr& from);
    void on_ack(sip::SipRequest ack, const net::NetAddr& from);
    void client_retransmit(const TxKey& key);
    void client_expire(const TxKey& key);
    void server_retransmit(const TxKey& key);
    void server_expire(const TxKey& key);
    void terminate(ClientTransaction& tx);
    void terminate(ServerTransaction& tx);
    void send_auto_ack(const ClientTransaction& tx, const sip::SipResponse& final);

    net::Transport& transport_;
    net::TimerQueue& timers_;
    TimerConfig cfg_;
    RequestHandler on_request_;
    AckHandler on_ack_;
    StrayResponseHandler on_stray_;
    BadMessageHandler on_bad_;
    std::map<TxKey, std::shared_ptr<ClientTransaction>> clients_;
    std::map<TxKey, std::shared_ptr<ServerTransaction>> servers_;
};

// CANCEL for a pending INVITE: same branch, same CSeq number, own method.
sip::SipRequest make_cancel(const sip::SipRequest& invite);

}  // namespace ipts::txn
