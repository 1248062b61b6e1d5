#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipts/net/clock.hpp"
#include "ipts/net/timer_queue.hpp"
#include "ipts/net/transport.hpp"
#include "ipts/proxy/cdr.hpp"
#include "ipts/proxy/config.hpp"
#include "ipts/proxy/routing.hpp"
#include "ipts/reg/registrar.hpp"
#include "ipts/reg/store.hpp"
#include "ipts/txn/transaction.hpp"

namespace ipts::proxy {

// Call control on top of the transaction layer: registration, digest-gated
// INVITE routing, parallel forking, in-dialog relay, music-on-hold legs and
// call accounting. Single-threaded; every entry point runs on the owning loop.
//
// Media never terminates here. Internal calls exchange SDP end-to-end, so RTP
// flows phone to phone; only signaling takes the triangular path.
class ProxyCore {
public:
    ProxyCore(net::Transport& transport, net::TimerQueue& timers, const net::Clock& clock,
              reg::LocationStore& store, ProxyConfig cfg);

    // Periodic upkeep: ingest journal lines a peer proxy appended, drop
    // expired bindings. The daemon calls this a few times per second.
    void poll();

    size_t active_calls() const { return calls_.size(); }
    txn::TransactionEngine& engine() { return engine_; }
    reg::Registrar& registrar() { return registrar_; }
    const ProxyConfig& config() const { return cfg_; }
    const CdrWriter* cdr_writer() const { return cdr_.get(); }

private:
    enum class HoldState { None, ByCaller, ByCallee };

    struct BranchState {
        std::shared_ptr<txn::ClientTransaction> tx;
        net::NetAddr dest;
        bool cancelled = false;
        std::optional<sip::StatusCode> final;
    };

    // Dialog the proxy itself runs toward the b2bua to play hold music at the
    // held party's RTP address.
    struct MohLeg {
        std::string call_id;
        std::string local_tag;
        std::string remote_tag;
        sip::SipUri remote_target;
        uint32_t cseq = 1;
        bool established = false;
        bool teardown_requested = false;
    };

    struct Call {
        std::string call_id;
        sip::SipRequest invite;  // as received from the caller
        std::shared_ptr<txn::ServerTransaction> server_tx;
        net::NetAddr caller_addr;
        sip::SipUri caller_contact;
        std::string caller_tag;
        reg::Subscriber caller_sub;
        std::string dialed;
        bool via_b2bua = false;
        std::vector<BranchState> branches;
        bool answered = false;
        bool finished = false;  // failed upstream before answer
        bool cancel_requested = false;
        bool redirect_spent = false;
        bool rerouted_to_vm = false;
        int winner = -1;
        net::NetAddr callee_addr;
        sip::SipUri callee_contact;
        std::string caller_media_host;
        uint16_t caller_media_port = 0;
        std::string callee_media_host;
        uint16_t callee_media_port = 0;
        HoldState hold = HoldState::None;
        std::optional<MohLeg> moh;
        net::TimerQueue::TimerId no_answer_timer = 0;
        Cdr cdr;
        bool cdr_written = false;
    };

    using CallPtr = std::shared_ptr<Call>;

    void on_request(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void on_ack(const sip::SipRequest& ack, const net::NetAddr& from);
    void on_stray_response(const sip::SipResponse& resp, const net::NetAddr& from);

    void start_call(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void handle_cancel(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void in_dialog_request(const sip::SipRequest& req,
                           std::shared_ptr<txn::ServerTransaction> stx);

    void dispatch_decision(const CallPtr& call, const RoutingDecision& decision);
    void add_branch(const CallPtr& call, const sip::SipUri& target, const net::NetAddr& dest);
    void on_branch_response(const std::string& call_id, size_t index,
                            const sip::SipResponse& resp);
    void on_branch_win(const CallPtr& call, size_t index, const sip::SipResponse& resp);
    void follow_redirect(const CallPtr& call, const sip::SipResponse& resp);
    void cancel_pending_branches(const CallPtr& call);
    void maybe_finish_failed(const CallPtr& call);
    void on_no_answer(const std::string& call_id);

    void start_moh(const CallPtr& call, const std::string& held_host, uint16_t held_port);
    void stop_moh(const CallPtr& call);
    void ack_response(const sip::SipResponse& resp, const net::NetAddr& dest);
    void bye_dialog(const sip::SipResponse& resp, const net::NetAddr& dest);

    void write_cdr(const CallPtr& call, Disposition d);
    void finish_call(const CallPtr& call, const sip::SipResponse& upstream, Disposition d);
    void drop_call_later(const std::string& call_id, int64_t delay_ms);
    void note_media(const CallPtr& call, bool from_caller, const std::string& body);

    sip::Via own_via() const;
    std::string record_route_value() const;
    sip::SipRequest relay_copy(const sip::SipRequest& req) const;
    bool is_from_caller(const CallPtr& call, const sip::SipRequest& req) const;
    int64_t now_ms() const { return clock_.now_ms(); }

    net::TimerQueue& timers_;
    const net::Clock& clock_;
    reg::LocationStore& store_;
    ProxyConfig cfg_;
    reg::Registrar registrar_;
    txn::TransactionEngine engine_;
    std::unique_ptr<CdrWriter> cdr_;
    std::map<std::string, CallPtr> calls_;
};

}  // namespace ipts::proxy
