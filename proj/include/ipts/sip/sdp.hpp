#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipts::sip {

enum class SdpDirection { SendRecv, SendOnly, RecvOnly, Inactive };

const char* to_string(SdpDirection d);

// Session description subset: v/o/s/c/t lines, one audio m-line, direction
// attribute. Anything else is carried through verbatim.
struct SdpBody {
    std::string session_name = "ipts";
    std::string origin;        // o= value, defaulted at serialization when empty
    std::string timing = "0 0";
    std::string connection_address;
    uint16_t media_port = 0;
    std::vector<int> payload_types;
    SdpDirection direction = SdpDirection::SendRecv;
    std::vector<std::string> extra_lines;

    bool operator==(const SdpBody&) const = default;

    std::string to_string() const;
    static std::optional<SdpBody> parse(std::string_view raw);
};

// Standard audio description: PCMU plus telephone-event, with rtpmap attributes.
SdpBody make_audio_sdp(const std::string& address, uint16_t port,
                       SdpDirection direction = SdpDirection::SendRecv);

// Hold is signalled three ways in the wild: an empty body, a=sendonly, or a
// zeroed connection address.
bool sdp_signals_hold(const std::string& body);

}  // namespace ipts::sip
