#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ipts/b2bua/config.hpp"
#include "ipts/media/engine.hpp"
#include "ipts/net/clock.hpp"
#include "ipts/net/timer_queue.hpp"
#include "ipts/net/transport.hpp"
#include "ipts/sip/sdp.hpp"
#include "ipts/txn/transaction.hpp"

namespace ipts::b2bua {

// Swaps the media address of an offer for the given relay address. Pure;
// applying it twice with the same address changes nothing further.
sip::SdpBody rewrite_topology(const sip::SdpBody& sdp, const std::string& host, uint16_t port);

// Back-to-back user agent. Every inbound call terminates here as leg A;
// bridged calls re-originate as an independent leg B toward a trunk or, for
// IVR transfers, back through the proxy. Feature calls (hold music,
// voicemail, conference rooms, IVR menus) anchor their media locally.
class B2buaCore {
public:
    B2buaCore(net::Transport& transport, net::TimerQueue& timers, const net::Clock& clock,
              media::MediaEngine& media, B2buaConfig cfg);

    size_t active_calls() const { return calls_.size(); }
    txn::TransactionEngine& engine() { return engine_; }
    const B2buaConfig& config() const { return cfg_; }

private:
    enum class Mode { Bridge, Moh, Voicemail, Conference, Ivr };

    struct Leg {
        std::string call_id;
        std::string local_value;   // our half of From/To, carries our tag
        std::string remote_value;  // the peer's half
        sip::SipUri remote_target;
        net::NetAddr remote_addr;
        std::vector<std::string> route_set;  // Route values for in-dialog requests
        net::NetAddr route_addr;             // where those requests go on the wire
        uint32_t cseq = 0;         // highest CSeq number we issued on this leg
        uint32_t invite_cseq = 0;  // the number our ACK must echo
        media::SessionId session = 0;
        bool answered = false;
        bool bye_sent = false;
    };

    struct Call {
        Mode mode = Mode::Bridge;
        Leg a;
        Leg b;

        sip::SipRequest a_invite;
        std::shared_ptr<txn::ServerTransaction> a_tx;
        bool a_cancelled = false;

        std::shared_ptr<txn::ClientTransaction> b_tx;
        std::string trunk_name;
        bool b_auth_retried = false;

        bool a_holds = false;
        bool b_holds = false;

        std::string vm_aor;
        int64_t answered_ms = 0;
        net::TimerQueue::TimerId vm_timer = 0;

        int ivr_attempts = 0;
        net::TimerQueue::TimerId ivr_timer = 0;
        bool ivr_busy = false;  // a digit was accepted, leg B is in flight or up

        std::string room;
    };

    void on_request(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void on_new_invite(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void on_cancel(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void on_bye(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void on_reinvite(Call& call, bool on_a, const sip::SipRequest& req,
                     std::shared_ptr<txn::ServerTransaction> stx);

    void start_bridge(Call& call, const DialplanRule& rule, const sip::SdpBody& offer);
    void start_moh(Call& call, const sip::SdpBody& offer);
    void start_voicemail(Call& call, const sip::SdpBody& offer);
    void start_conference(Call& call, const sip::SdpBody& offer);
    void start_ivr(Call& call, const sip::SdpBody& offer);

    void originate_b(Call& call, sip::SipRequest invite, const net::NetAddr& dest);
    void on_b_response(const std::string& id, const sip::SipResponse& resp);
    void retry_b_with_auth(Call& call, const sip::SipResponse& challenge);
    void answer_a(Call& call, sip::SdpDirection direction);

    void on_ivr_digit(const std::string& id, char digit);
    void ivr_strike(Call& call);
    void arm_ivr_timer(Call& call);

    // Rewires sources and sinks from the two hold flags.
    void apply_media_state(Call& call);

    void finalize_voicemail(Call& call);

    void hangup_leg(Leg& leg);
    void reject_call(Call& call, int code);
    void destroy_call(Call& call);

    static void adopt_routes(Leg& leg, std::vector<std::string> record_routes, bool reverse);
    net::NetAddr leg_dest(const Leg& leg) const;
    sip::SipRequest build_in_dialog(Leg& leg, sip::SipMethod method);
    void send_ack(Leg& leg);
    sip::Via own_via() const;
    std::string own_contact() const;
    Call* find_by_leg(const std::string& call_id, bool& on_a);
    void respond(const std::shared_ptr<txn::ServerTransaction>& stx, const sip::SipRequest& req,
                 int code);
    void play_moh_to(media::SessionId sid);
    std::vector<int16_t> load_audio(const std::string& path) const;

    const net::Clock& clock_;
    net::TimerQueue& timers_;
    media::MediaEngine& media_;
    B2buaConfig cfg_;
    txn::TransactionEngine engine_;
    std::map<std::string, Call> calls_;             // keyed by leg A Call-ID
    std::map<std::string, std::string> leg_index_;  // leg B Call-ID -> leg A Call-ID
    std::vector<int16_t> moh_samples_;
    std::vector<int16_t> vm_greeting_;
    std::vector<int16_t> ivr_greeting_;
    std::vector<int16_t> ivr_invalid_;
};

}  // namespace ipts::b2bua
