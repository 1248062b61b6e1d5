#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ipts::media {

constexpr int kPtPcmu = 0;
constexpr int kPtTelephoneEvent = 101;

// Fixed 12-byte header, no CSRCs, no extensions.
struct RtpPacket {
    uint8_t payload_type = kPtPcmu;
    bool marker = false;
    uint16_t seq = 0;
    uint32_t timestamp = 0;
    uint32_t ssrc = 0;
    std::string payload;

    std::string serialize() const;
    static std::optional<RtpPacket> parse(std::string_view data);
};

}  // namespace ipts::media
