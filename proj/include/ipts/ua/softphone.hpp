#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipts/media/engine.hpp"
#include "ipts/net/clock.hpp"
#include "ipts/net/timer_queue.hpp"
#include "ipts/net/transport.hpp"
#include "ipts/sip/sdp.hpp"
#include "ipts/txn/transaction.hpp"

namespace ipts::ua {

enum class RegState { Unregistered, Registering, Registered };
enum class CallState { Idle, RingingIn, RingingOut, Active, Held };

const char* to_string(RegState s);
const char* to_string(CallState s);

struct SoftphoneConfig {
    std::string ext;
    std::string password;
    net::NetAddr proxy{};
    std::string realm = "pbx";
    std::string local_host = "127.0.0.1";
    uint16_t local_port = 0;  // signaling port advertised in Via/Contact
    int ring_timeout_s = 30;
    int register_expires_s = 300;
    double tone_hz = 0;  // audio injected once a call is up; 0 sends silence
};

// One user agent: a single line with local settings, driven by console
// commands on one side and SIP on the other. At most one call at a time; a
// transfer briefly anchors a second dialog while the phone bridges the audio.
class Softphone {
public:
    using EventSink = std::function<void(const std::string& event, const std::string& detail)>;

    Softphone(net::Transport& transport, net::TimerQueue& timers, const net::Clock& clock,
              media::MediaEngine& media, SoftphoneConfig cfg);
    ~Softphone();

    void set_event_sink(EventSink sink) { sink_ = std::move(sink); }

    // Console entry point. Returns an error message, empty when accepted.
    std::string command(const std::string& line);

    std::string do_register();
    std::string do_call(const std::string& digits);
    std::string do_answer();
    std::string do_hold();
    std::string do_unhold();
    std::string do_dtmf(char digit);
    std::string do_transfer(const std::string& digits);
    std::string do_forward(const std::string& target_or_off);
    std::string do_hangup();
    void do_unregister();  // best effort, used on quit

    RegState registration() const { return reg_state_; }
    CallState call_state() const { return call_state_; }
    const std::optional<std::string>& forward_target() const { return forward_target_; }
    media::SessionId main_session() const;
    const SoftphoneConfig& config() const { return cfg_; }

    // Audio received during the last ended call; cleared by the take.
    std::vector<int16_t> take_capture();

private:
    struct Dialog {
        std::string call_id;
        std::string local_value;
        std::string remote_value;
        sip::SipUri remote_target;
        net::NetAddr remote_addr;
        std::vector<std::string> route_set;
        net::NetAddr route_addr;
        uint32_t cseq = 0;
        uint32_t invite_cseq = 0;  // what the next ACK echoes
        media::SessionId session = 0;
        bool answered = false;
        bool cancelled = false;
        bool auth_retried = false;
        bool peer_holds = false;
        sip::SipRequest invite;
        std::shared_ptr<txn::ServerTransaction> rx_invite_tx;  // incoming, pre-answer
        std::shared_ptr<txn::ClientTransaction> tx;            // outgoing, pre-answer
    };

    void on_request(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void on_invite(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void on_reinvite(Dialog& d, const sip::SipRequest& req,
                     std::shared_ptr<txn::ServerTransaction> stx);
    void on_cancel(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);
    void on_bye(const sip::SipRequest& req, std::shared_ptr<txn::ServerTransaction> stx);

    void send_register(int expires_s);
    void on_register_response(const sip::SipResponse& resp, int expires_s);

    Dialog make_uac_dialog(const std::string& digits);
    void on_call_response(const sip::SipResponse& resp);
    void on_xfer_response(const sip::SipResponse& resp);
    // Common 2xx bookkeeping for dialogs we originated.
    void establish_uac(Dialog& d, const sip::SipResponse& resp);
    void send_reinvite(sip::SdpDirection direction, CallState on_ok, const char* event);

    void start_media(Dialog& d);
    sip::SipRequest build_in_dialog(Dialog& d, sip::SipMethod method);
    void send_ack(Dialog& d);
    void send_bye(Dialog& d);
    net::NetAddr dialog_dest(const Dialog& d) const;
    void adopt_routes(Dialog& d, std::vector<std::string> record_routes, bool reverse);

    void teardown_call(const char* event, const std::string& detail);
    void arm_ring_timer();
    void cancel_ring_timer();
    void arm_refresh(int64_t delay_ms);

    void fire(const std::string& event, const std::string& detail = "");
    sip::Via own_via() const;
    std::string own_contact() const;
    sip::SipUri own_uri() const;

    const net::Clock& clock_;
    net::TimerQueue& timers_;
    media::MediaEngine& media_;
    SoftphoneConfig cfg_;
    txn::TransactionEngine engine_;
    EventSink sink_;

    RegState reg_state_ = RegState::Unregistered;
    std::string reg_call_id_;
    uint32_t reg_cseq_ = 0;
    bool reg_auth_retried_ = false;
    bool reg_min_retried_ = false;
    net::TimerQueue::TimerId refresh_timer_ = 0;

    CallState call_state_ = CallState::Idle;
    std::optional<std::string> forward_target_;
    std::optional<Dialog> main_;
    std::optional<Dialog> xfer_;
    net::TimerQueue::TimerId ring_timer_ = 0;
    std::vector<int16_t> last_capture_;
};

}  // namespace ipts::ua
