#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ipts/media/audio.hpp"
#include "ipts/media/dtmf.hpp"
#include "ipts/media/rtp.hpp"
#include "ipts/net/event_loop.hpp"
#include "ipts/net/transport.hpp"

namespace ipts::media {

// Hands out even RTP ports sequentially, wrapping at the top of the range.
class PortAllocator {
public:
    PortAllocator(uint16_t lo = 16384, uint16_t hi = 32767) : lo_(lo & ~1), hi_(hi), next_(lo_) {}
    std::optional<uint16_t> alloc();
    void free(uint16_t port);
    size_t in_use() const { return used_.size(); }

private:
    uint16_t lo_, hi_, next_;
    std::set<uint16_t> used_;
};

using SessionId = uint64_t;
using RoomId = std::string;

enum class SourceKind { None, Tone, File, Room };
enum class SinkKind { Discard, Record, Room, Relay };

struct SessionStats {
    uint64_t tx_packets = 0;
    uint64_t rx_packets = 0;
    uint64_t rx_audio_packets = 0;
    uint64_t rx_event_packets = 0;
    std::set<net::NetAddr> rx_from;
};

// One RTP socket plus a source feeding its transmit path and a sink consuming
// its receive path. Rooms mix the latest frame of every other member; relays
// hand payloads to a partner session for re-emission under its own identity.
class MediaEngine {
public:
    MediaEngine(net::EventLoop& loop, std::string bind_host,
                PortAllocator allocator = PortAllocator());
    ~MediaEngine();

    SessionId create_session();  // 0 on bind failure
    void destroy_session(SessionId sid);
    bool has_session(SessionId sid) const { return sessions_.count(sid) != 0; }
    uint16_t session_port(SessionId sid) const;
    SessionId session_by_port(uint16_t port) const;  // 0 when no session owns it
    void set_remote(SessionId sid, const net::NetAddr& remote);
    net::NetAddr session_remote(SessionId sid) const;

    void set_source_none(SessionId sid);
    void set_source_tone(SessionId sid, double freq_hz);
    void set_source_file(SessionId sid, std::vector<int16_t> samples, bool loop);
    bool file_finished(SessionId sid) const;
    SourceKind source_kind(SessionId sid) const;
    SinkKind sink_kind(SessionId sid) const;
    SessionId relay_peer(SessionId sid) const;

    void set_sink_discard(SessionId sid);
    void set_sink_record(SessionId sid);
    const std::vector<int16_t>& recorded(SessionId sid) const;

    void join_room(SessionId sid, const RoomId& room);
    void leave_room(SessionId sid);
    size_t room_size(const RoomId& room) const;

    // Couples two sessions: payloads received on one leave through the other
    // with fresh ssrc/seq/timestamp. Symmetric.
    void bridge(SessionId a, SessionId b);
    void unbridge(SessionId sid);

    void send_dtmf(SessionId sid, char digit);
    void set_dtmf_handler(SessionId sid, std::function<void(char)> handler);
    // Fires on every packet; the harness capture log hangs off this.
    void set_packet_tap(SessionId sid,
                        std::function<void(const net::NetAddr&, const RtpPacket&)> tap);

    const SessionStats& stats(SessionId sid) const;

private:
    struct PendingEvent {
        DtmfEvent event;
        bool marker = false;
        uint32_t timestamp = 0;
    };

    struct Session {
        SessionId id = 0;
        std::unique_ptr<net::UdpTransport> sock;
        uint16_t port = 0;
        net::NetAddr remote;
        SourceKind source = SourceKind::None;
        SinkKind sink = SinkKind::Discard;
        std::unique_ptr<ToneSource> tone;
        std::vector<int16_t> file;
        size_t file_pos = 0;
        bool file_loop = false;
        RoomId room;
        SessionId peer = 0;  // relay partner
        std::vector<int16_t> record;
        Frame last_rx = Frame(kFrameSamples, 0);
        bool last_rx_fresh = false;
        uint16_t seq = 0;
        uint32_t timestamp = 0;
        uint32_t ssrc = 0;
        std::deque<PendingEvent> event_queue;
        DtmfDetector detector;
        std::function<void(char)> on_digit;
        std::function<void(const net::NetAddr&, const RtpPacket&)> tap;
        SessionStats stats;
    };

    void tick();
    void transmit(Session& s);
    Frame source_frame(Session& s);
    void on_packet(Session& s, const net::NetAddr& from, std::string_view data);

    net::EventLoop& loop_;
    std::string bind_host_;
    PortAllocator ports_;
    std::map<SessionId, Session> sessions_;
    std::map<RoomId, std::set<SessionId>> rooms_;
    SessionId next_id_ = 1;
    net::TimerQueue::TimerId tick_timer_ = 0;
};

}  // namespace ipts::media
