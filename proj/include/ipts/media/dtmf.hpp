#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ipts::media {

// telephone-event payload: event, end flag + volume, 16-bit duration.
struct DtmfEvent {
    uint8_t event = 0;
    bool end = false;
    uint8_t volume = 10;
    uint16_t duration = 0;

    std::string serialize() const;
    static std::optional<DtmfEvent> parse(std::string_view payload);
};

// '0'..'9', '*', '#', 'A'..'D' to event codes 0..15 and back.
std::optional<uint8_t> dtmf_event_of(char digit);
std::optional<char> dtmf_digit_of(uint8_t event);

// Collapses the packet train for one key press into a single digit report.
// Any packet of an unseen (event, rtp timestamp) pair triggers exactly once.
class DtmfDetector {
public:
    std::optional<char> on_packet(uint32_t rtp_timestamp, std::string_view payload);

private:
    bool seen_any_ = false;
    uint8_t last_event_ = 0;
    uint32_t last_ts_ = 0;
};

}  // namespace ipts::media
