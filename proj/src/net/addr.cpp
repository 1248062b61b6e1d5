#include "ipts/net/addr.hpp"

#include "ipts/util/strings.hpp"

namespace ipts::net {

std::optional<NetAddr> NetAddr::parse(std::string_view text) {
    size_t colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) return std::nullopt;
    auto port = util::parse_int<uint16_t>(text.substr(colon + 1));
    if (!port || *port == 0) return std::nullopt;
    return NetAddr{std::string(text.substr(0, colon)), *port};
}

}  // namespace ipts::net
