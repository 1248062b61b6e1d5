#pragma once

#include <string>
#include <string_view>

namespace ipts::util {

// Lowercase hex MD5, used by the SIP digest scheme.
std::string md5_hex(std::string_view data);

}  // namespace ipts::util
