#include "ipts/media/dtmf.hpp"

namespace ipts::media {

namespace {
constexpr const char* kDigits = "0123456789*#ABCD";
}

std::string DtmfEvent::serialize() const {
    std::string out(4, '\0');
    out[0] = static_cast<char>(event);
    out[1] = static_cast<char>((end ? 0x80 : 0) | (volume & 0x3F));
    out[2] = static_cast<char>(duration >> 8);
    out[3] = static_cast<char>(duration & 0xFF);
    return out;
}

std::optional<DtmfEvent> DtmfEvent::parse(std::string_view payload) {
    if (payload.size() < 4) return std::nullopt;
    DtmfEvent e;
    e.event = static_cast<uint8_t>(payload[0]);
    uint8_t b1 = static_cast<uint8_t>(payload[1]);
    e.end = (b1 & 0x80) != 0;
    e.volume = b1 & 0x3F;
    e.duration = static_cast<uint16_t>((static_cast<uint8_t>(payload[2]) << 8) |
                                       static_cast<uint8_t>(payload[3]));
    return e;
}

std::optional<uint8_t> dtmf_event_of(char digit) {
    for (uint8_t i = 0; kDigits[i]; ++i)
        if (kDigits[i] == digit) return i;
    return std::nullopt;
}

std::optional<char> dtmf_digit_of(uint8_t event) {
    if (event > 15) return std::nullopt;
    return kDigits[event];
}

std::optional<char> DtmfDetector::on_packet(uint32_t rtp_timestamp, std::string_view payload) {
    auto ev = DtmfEvent::parse(payload);
    if (!ev) return std::nullopt;
    if (seen_any_ && ev->event == last_event_ && rtp_timestamp == last_ts_) return std::nullopt;
    seen_any_ = true;
    last_event_ = ev->event;
    last_ts_ = rtp_timestamp;
    return dtmf_digit_of(ev->event);
}

}  // namespace ipts::media
