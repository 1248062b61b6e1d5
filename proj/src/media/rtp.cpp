#include "ipts/media/rtp.hpp"

namespace ipts::media {

std::string RtpPacket::serialize() const {
    std::string out;
    out.reserve(12 + payload.size());
    out.push_back(static_cast<char>(0x80));  // V=2, no padding, no extension, no CSRC
    out.push_back(static_cast<char>((marker ? 0x80 : 0) | (payload_type & 0x7F)));
    out.push_back(static_cast<char>(seq >> 8));
    out.push_back(static_cast<char>(seq & 0xFF));
    out.push_back(static_cast<char>(timestamp >> 24));
    out.push_back(static_cast<char>((timestamp >> 16) & 0xFF));
    out.push_back(static_cast<char>((timestamp >> 8) & 0xFF));
    out.push_back(static_cast<char>(timestamp & 0xFF));
    out.push_back(static_cast<char>(ssrc >> 24));
    out.push_back(static_cast<char>((ssrc >> 16) & 0xFF));
    out.push_back(static_cast<char>((ssrc >> 8) & 0xFF));
    out.push_back(static_cast<char>(ssrc & 0xFF));
    out += payload;
    return out;
}

std::optional<RtpPacket> RtpPacket::parse(std::string_view data) {
    if (data.size() < 12) return std::nullopt;
    auto b = [&](size_t i) { return static_cast<uint8_t>(data[i]); };
    if ((b(0) >> 6) != 2) return std::nullopt;
    if (b(0) & 0x0F) return std::nullopt;  // CSRCs unsupported
    RtpPacket p;
    p.marker = (b(1) & 0x80) != 0;
    p.payload_type = b(1) & 0x7F;
    p.seq = static_cast<uint16_t>((b(2) << 8) | b(3));
    p.timestamp = (uint32_t(b(4)) << 24) | (uint32_t(b(5)) << 16) | (uint32_t(b(6)) << 8) | b(7);
    p.ssrc = (uint32_t(b(8)) << 24) | (uint32_t(b(9)) << 16) | (uint32_t(b(10)) << 8) | b(11);
    p.payload = std::string(data.substr(12));
    return p;
}

}  // namespace ipts::media
