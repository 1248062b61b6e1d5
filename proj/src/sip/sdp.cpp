#include "ipts/sip/sdp.hpp"

#include "ipts/util/strings.hpp"

namespace ipts::sip {

const char* to_string(SdpDirection d) {
    switch (d) {
        case SdpDirection::SendRecv: return "sendrecv";
        case SdpDirection::SendOnly: return "sendonly";
        case SdpDirection::RecvOnly: return "recvonly";
        case SdpDirection::Inactive: return "inactive";
    }
    return "sendrecv";
}

std::string SdpBody::to_string() const {
    std::string out;
    out += "v=0\r\n";
    out += "o=" + (origin.empty() ? "ipts 0 0 IN IP4 " + connection_address : origin) + "\r\n";
    out += "s=" + session_name + "\r\n";
    out += "c=IN IP4 " + connection_address + "\r\n";
    out += "t=" + timing + "\r\n";
    out += "m=audio " + std::to_string(media_port) + " RTP/AVP";
    for (int pt : payload_types) out += " " + std::to_string(pt);
    out += "\r\n";
    out += "a=" + std::string(ipts::sip::to_string(direction)) + "\r\n";
    for (const auto& line : extra_lines) out += line + "\r\n";
    return out;
}

std::optional<SdpBody> SdpBody::parse(std::string_view raw) {
    SdpBody sdp;
    sdp.session_name.clear();
    bool saw_version = false, saw_media = false, saw_direction = false;

    size_t pos = 0;
    while (pos < raw.size()) {
        size_t eol = raw.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? raw.substr(pos) : raw.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? raw.size() : eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.size() < 2 || line[1] != '=') return std::nullopt;
        std::string_view value = line.substr(2);

        switch (line[0]) {
            case 'v':
                if (value != "0") return std::nullopt;
                saw_version = true;
                break;
            case 'o': sdp.origin = std::string(value); break;
            case 's': sdp.session_name = std::string(value); break;
            case 't': sdp.timing = std::string(value); break;
            case 'c': {
                auto parts = util::split_ws(value);
                if (parts.size() != 3 || parts[0] != "IN" || parts[1] != "IP4")
                    return std::nullopt;
                sdp.connection_address = parts[2];
                break;
            }
            case 'm': {
                if (saw_media) return std::nullopt;  // single audio stream only
                auto parts = util::split_ws(value);
                if (parts.size() < 4 || parts[0] != "audio" || parts[2] != "RTP/AVP")
                    return std::nullopt;
                auto port = util::parse_int<uint16_t>(parts[1]);
                if (!port) return std::nullopt;
                sdp.media_port = *port;
                for (size_t i = 3; i < parts.size(); ++i) {
                    auto pt = util::parse_int<int>(parts[i]);
                    if (!pt) return std::nullopt;
                    sdp.payload_types.push_back(*pt);
                }
                saw_media = true;
                break;
            }
            case 'a':
                if (value == "sendrecv") { sdp.direction = SdpDirection::SendRecv; saw_direction = true; }
                else if (value == "sendonly") { sdp.direction = SdpDirection::SendOnly; saw_direction = true; }
                else if (value == "recvonly") { sdp.direction = SdpDirection::RecvOnly; saw_direction = true; }
                else if (value == "inactive") { sdp.direction = SdpDirection::Inactive; saw_direction = true; }
                else sdp.extra_lines.emplace_back(line);
                break;
            default: sdp.extra_lines.emplace_back(line); break;
        }
    }
    (void)saw_direction;
    if (!saw_version || !saw_media) return std::nullopt;
    if (sdp.payload_types.empty()) return std::nullopt;
    if (sdp.direction != SdpDirection::Inactive) {
        if (sdp.media_port == 0 || sdp.media_port % 2 != 0) return std::nullopt;
    }
    return sdp;
}

SdpBody make_audio_sdp(const std::string& address, uint16_t port, SdpDirection direction) {
    SdpBody sdp;
    sdp.connection_address = address;
    sdp.media_port = port;
    sdp.payload_types = {0, 101};
    sdp.direction = direction;
    sdp.extra_lines = {"a=rtpmap:0 PCMU/8000", "a=rtpmap:101 telephone-event/8000",
                       "a=ptime:20"};
    return sdp;
}

bool sdp_signals_hold(const std::string& body) {
    if (body.empty()) return true;
    auto sdp = SdpBody::parse(body);
    if (!sdp) return false;
    if (sdp->direction == SdpDirection::SendOnly || sdp->direction == SdpDirection::Inactive)
        return true;
    if (sdp->connection_address == "0.0.0.0") return true;
    return false;
}

}  // namespace ipts::sip
