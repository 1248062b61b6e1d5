#pragma once

#include <string>

namespace ipts::sip {

// RFC 3261 magic cookie; every branch this system generates starts with it.
inline constexpr const char* kBranchMagic = "z9hG4bK";

std::string gen_branch();
std::string gen_tag();
std::string gen_call_id(const std::string& host);
std::string gen_nonce();

}  // namespace ipts::sip
