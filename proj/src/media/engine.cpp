#include "ipts/media/engine.hpp"

#include <random>

#include "ipts/media/g711.hpp"
#include "ipts/util/log.hpp"

namespace ipts::media {

std::optional<uint16_t> PortAllocator::alloc() {
    for (uint32_t tries = 0; tries <= uint32_t(hi_ - lo_) / 2; ++tries) {
        uint16_t candidate = next_;
        next_ = candidate + 2 > hi_ ? lo_ : candidate + 2;
        if (used_.insert(candidate).second) return candidate;
    }
    return std::nullopt;
}

void PortAllocator::free(uint16_t port) { used_.erase(port); }

MediaEngine::MediaEngine(net::EventLoop& loop, std::string bind_host, PortAllocator allocator)
    : loop_(loop), bind_host_(std::move(bind_host)), ports_(allocator) {
    tick_timer_ = loop_.add_timer(kFrameMs, [this] { tick(); });
}

MediaEngine::~MediaEngine() {
    loop_.cancel_timer(tick_timer_);
    while (!sessions_.empty()) destroy_session(sessions_.begin()->first);
}

SessionId MediaEngine::create_session() {
    static std::mt19937_64 ssrc_rng(0x717e5u);
    for (int attempt = 0; attempt < 16; ++attempt) {
        auto port = ports_.alloc();
        if (!port) return 0;
        std::unique_ptr<net::UdpTransport> sock;
        try {
            sock = std::make_unique<net::UdpTransport>(loop_, net::NetAddr{bind_host_, *port});
        } catch (const std::exception&) {
            ports_.free(*port);
            continue;  // port taken by someone else on the host
        }
        SessionId sid = next_id_++;
        Session s;
        s.id = sid;
        s.sock = std::move(sock);
        s.port = *port;
        s.ssrc = static_cast<uint32_t>(ssrc_rng());
        s.seq = static_cast<uint16_t>(ssrc_rng());
        auto [it, _] = sessions_.emplace(sid, std::move(s));
        Session* sp = &it->second;
        sp->sock->set_recv_handler([this, sp](const net::NetAddr& from, std::string_view data) {
            on_packet(*sp, from, data);
        });
        return sid;
    }
    return 0;
}

void MediaEngine::destroy_session(SessionId sid) {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return;
    leave_room(sid);
    unbridge(sid);
    ports_.free(it->second.port);
    sessions_.erase(it);
}

uint16_t MediaEngine::session_port(SessionId sid) const {
    auto it = sessions_.find(sid);
    return it == sessions_.end() ? 0 : it->second.port;
}

SessionId MediaEngine::session_by_port(uint16_t port) const {
    for (const auto& [sid, s] : sessions_)
        if (s.port == port) return sid;
    return 0;
}

void MediaEngine::set_remote(SessionId sid, const net::NetAddr& remote) {
    auto it = sessions_.find(sid);
    if (it != sessions_.end()) it->second.remote = remote;
}

net::NetAddr MediaEngine::session_remote(SessionId sid) const {
    auto it = sessions_.find(sid);
    return it == sessions_.end() ? net::NetAddr{} : it->second.remote;
}

void MediaEngine::set_source_none(SessionId sid) {
    auto it = sessions_.find(sid);
    if (it != sessions_.end()) it->second.source = SourceKind::None;
}

void MediaEngine::set_source_tone(SessionId sid, double freq_hz) {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return;
    it->second.source = SourceKind::Tone;
    it->second.tone = std::make_unique<ToneSource>(freq_hz);
}

void MediaEngine::set_source_file(SessionId sid, std::vector<int16_t> samples, bool loop) {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return;
    it->second.source = SourceKind::File;
    it->second.file = std::move(samples);
    it->second.file_pos = 0;
    it->second.file_loop = loop;
}

bool MediaEngine::file_finished(SessionId sid) const {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return true;
    const Session& s = it->second;
    return s.source == SourceKind::File && !s.file_loop && s.file_pos >= s.file.size();
}

void MediaEngine::set_sink_discard(SessionId sid) {
    auto it = sessions_.find(sid);
    if (it != sessions_.end()) it->second.sink = SinkKind::Discard;
}

void MediaEngine::set_sink_record(SessionId sid) {
    auto it = sessions_.find(sid);
    if (it != sessions_.end()) it->second.sink = SinkKind::Record;
}

SourceKind MediaEngine::source_kind(SessionId sid) const {
    auto it = sessions_.find(sid);
    return it == sessions_.end() ? SourceKind::None : it->second.source;
}

SinkKind MediaEngine::sink_kind(SessionId sid) const {
    auto it = sessions_.find(sid);
    return it == sessions_.end() ? SinkKind::Discard : it->second.sink;
}

SessionId MediaEngine::relay_peer(SessionId sid) const {
    auto it = sessions_.find(sid);
    return it == sessions_.end() ? 0 : it->second.peer;
}

const std::vector<int16_t>& MediaEngine::recorded(SessionId sid) const {
    static const std::vector<int16_t> empty;
    auto it = sessions_.find(sid);
    return it == sessions_.end() ? empty : it->second.record;
}

void MediaEngine::join_room(SessionId sid, const RoomId& room) {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return;
    leave_room(sid);
    it->second.source = SourceKind::Room;
    it->second.sink = SinkKind::Room;
    it->second.room = room;
    rooms_[room].insert(sid);
}

void MediaEngine::leave_room(SessionId sid) {
    auto it = sessions_.find(sid);
    if (it == sessions_.end() || it->second.room.empty()) return;
    auto room_it = rooms_.find(it->second.room);
    if (room_it != rooms_.end()) {
        room_it->second.erase(sid);
        if (room_it->second.empty()) rooms_.erase(room_it);
    }
    it->second.room.clear();
    if (it->second.source == SourceKind::Room) it->second.source = SourceKind::None;
    if (it->second.sink == SinkKind::Room) it->second.sink = SinkKind::Discard;
}

size_t MediaEngine::room_size(const RoomId& room) const {
    auto it = rooms_.find(room);
    return it == rooms_.end() ? 0 : it->second.size();
}

void MediaEngine::bridge(SessionId a, SessionId b) {
    auto ia = sessions_.find(a);
    auto ib = sessions_.find(b);
    if (ia == sessions_.end() || ib == sessions_.end()) return;
    ia->second.peer = b;
    ib->second.peer = a;
    ia->second.sink = SinkKind::Relay;
    ib->second.sink = SinkKind::Relay;
}

void MediaEngine::unbridge(SessionId sid) {
    auto it = sessions_.find(sid);
    if (it == sessions_.end() || it->second.peer == 0) return;
    auto peer_it = sessions_.find(it->second.peer);
    if (peer_it != sessions_.end()) {
        peer_it->second.peer = 0;
        if (peer_it->second.sink == SinkKind::Relay) peer_it->second.sink = SinkKind::Discard;
    }
    it->second.peer = 0;
    if (it->second.sink == SinkKind::Relay) it->second.sink = SinkKind::Discard;
}

void MediaEngine::send_dtmf(SessionId sid, char digit) {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return;
    auto event = dtmf_event_of(digit);
    if (!event) return;
    Session& s = it->second;
    // each queued packet advances the clock by one frame when it goes out
    uint32_t event_ts =
        s.timestamp + static_cast<uint32_t>(s.event_queue.size()) * kFrameSamples;
    for (int i = 0; i < 3; ++i) {
        PendingEvent pe;
        pe.event = DtmfEvent{*event, false, 10, static_cast<uint16_t>((i + 1) * kFrameSamples)};
        pe.marker = i == 0;
        pe.timestamp = event_ts;
        s.event_queue.push_back(pe);
    }
    for (int i = 0; i < 2; ++i) {
        PendingEvent pe;
        pe.event = DtmfEvent{*event, true, 10, static_cast<uint16_t>(4 * kFrameSamples)};
        pe.timestamp = event_ts;
        s.event_queue.push_back(pe);
    }
}

void MediaEngine::set_dtmf_handler(SessionId sid, std::function<void(char)> handler) {
    auto it = sessions_.find(sid);
    if (it != sessions_.end()) it->second.on_digit = std::move(handler);
}

void MediaEngine::set_packet_tap(SessionId sid,
                                 std::function<void(const net::NetAddr&, const RtpPacket&)> tap) {
    auto it = sessions_.find(sid);
    if (it != sessions_.end()) it->second.tap = std::move(tap);
}

const SessionStats& MediaEngine::stats(SessionId sid) const {
    static const SessionStats empty;
    auto it = sessions_.find(sid);
    return it == sessions_.end() ? empty : it->second.stats;
}

void MediaEngine::tick() {
    tick_timer_ = loop_.add_timer(kFrameMs, [this] { tick(); });
    for (auto& [sid, s] : sessions_) transmit(s);
    for (auto& [sid, s] : sessions_) {
        if (!s.last_rx_fresh) s.last_rx.assign(kFrameSamples, 0);  // silent members drop out
        s.last_rx_fresh = false;
    }
}

Frame MediaEngine::source_frame(Session& s) {
    switch (s.source) {
        case SourceKind::Tone:
            return s.tone ? s.tone->next_frame() : silence_frame();
        case SourceKind::File: {
            Frame f = silence_frame();
            for (int i = 0; i < kFrameSamples; ++i) {
                if (s.file_pos >= s.file.size()) {
                    if (!s.file_loop) break;
                    s.file_pos = 0;
                    if (s.file.empty()) break;
                }
                f[i] = s.file[s.file_pos++];
            }
            return f;
        }
        case SourceKind::Room: {
            auto room_it = rooms_.find(s.room);
            if (room_it == rooms_.end()) return silence_frame();
            std::vector<Frame> others;
            for (SessionId member : room_it->second) {
                if (member == s.id) continue;
                auto mit = sessions_.find(member);
                if (mit != sessions_.end()) others.push_back(mit->second.last_rx);
            }
            return mix_frames(others);
        }
        case SourceKind::None:
            break;
    }
    return silence_frame();
}

void MediaEngine::transmit(Session& s) {
    if (!s.remote.valid()) return;

    RtpPacket pkt;
    pkt.ssrc = s.ssrc;

    if (!s.event_queue.empty()) {
        PendingEvent pe = s.event_queue.front();
        s.event_queue.pop_front();
        pkt.payload_type = kPtTelephoneEvent;
        pkt.marker = pe.marker;
        pkt.seq = s.seq++;
        pkt.timestamp = pe.timestamp;
        pkt.payload = pe.event.serialize();
        s.sock->send(s.remote, pkt.serialize());
        ++s.stats.tx_packets;
        s.timestamp += kFrameSamples;
        return;
    }

    if (s.source == SourceKind::None) return;
    if (s.source == SourceKind::File && !s.file_loop && s.file_pos >= s.file.size()) return;

    Frame frame = source_frame(s);
    pkt.payload_type = kPtPcmu;
    pkt.seq = s.seq++;
    pkt.timestamp = s.timestamp;
    s.timestamp += kFrameSamples;
    pkt.payload.resize(kFrameSamples);
    for (int i = 0; i < kFrameSamples; ++i) pkt.payload[i] = static_cast<char>(pcmu_encode(frame[i]));
    s.sock->send(s.remote, pkt.serialize());
    ++s.stats.tx_packets;
}

void MediaEngine::on_packet(Session& s, const net::NetAddr& from, std::string_view data) {
    auto pkt = RtpPacket::parse(data);
    if (!pkt) return;
    ++s.stats.rx_packets;
    s.stats.rx_from.insert(from);
    if (s.tap) s.tap(from, *pkt);

    if (pkt->payload_type == kPtTelephoneEvent) {
        ++s.stats.rx_event_packets;
        auto digit = s.detector.on_packet(pkt->timestamp, pkt->payload);
        if (digit && s.on_digit) s.on_digit(*digit);
        // relays pass events through so far-end detectors still fire
        if (s.sink == SinkKind::Relay) {
            auto peer_it = sessions_.find(s.peer);
            if (peer_it != sessions_.end() && peer_it->second.remote.valid()) {
                Session& out = peer_it->second;
                RtpPacket fwd = *pkt;
                fwd.ssrc = out.ssrc;
                fwd.seq = out.seq++;
                fwd.timestamp = out.timestamp;
                out.sock->send(out.remote, fwd.serialize());
                ++out.stats.tx_packets;
            }
        }
        return;
    }

    ++s.stats.rx_audio_packets;
    switch (s.sink) {
        case SinkKind::Record: {
            for (char c : pkt->payload)
                s.record.push_back(pcmu_decode(static_cast<uint8_t>(c)));
            break;
        }
        case SinkKind::Room: {
            Frame f(kFrameSamples, 0);
            size_t n = std::min<size_t>(pkt->payload.size(), kFrameSamples);
            for (size_t i = 0; i < n; ++i)
                f[i] = pcmu_decode(static_cast<uint8_t>(pkt->payload[i]));
            s.last_rx = std::move(f);
            s.last_rx_fresh = true;
            break;
        }
        case SinkKind::Relay: {
            auto peer_it = sessions_.find(s.peer);
            if (peer_it == sessions_.end()) break;
            Session& out = peer_it->second;
            if (!out.remote.valid()) break;
            RtpPacket fwd = *pkt;  // payload carried byte-for-byte
            fwd.ssrc = out.ssrc;
            fwd.seq = out.seq++;
            fwd.timestamp = out.timestamp;
            out.timestamp += kFrameSamples;
            out.sock->send(out.remote, fwd.serialize());
            ++out.stats.tx_packets;
            break;
        }
        case SinkKind::Discard:
            break;
    }
}

}  // namespace ipts::media
