#include "ipts/sip/ids.hpp"

#include <atomic>
#include <cstdio>
#include <random>

namespace ipts::sip {

namespace {

std::atomic<uint64_t> g_counter{1};

uint64_t process_entropy() {
    static const uint64_t seed = [] {
        std::random_device rd;
        return (static_cast<uint64_t>(rd()) << 32) ^ rd();
    }();
    return seed;
}

std::string token(uint64_t salt) {
    uint64_t n = g_counter.fetch_add(1);
    char buf[32];
    snprintf(buf, sizeof(buf), "%08llx%04llx",
             static_cast<unsigned long long>((process_entropy() ^ salt) & 0xffffffff),
             static_cast<unsigned long long>(n & 0xffff));
    return buf;
}

}  // namespace

std::string gen_branch() { return std::string(kBranchMagic) + "-" + token(0x6272); }
std::string gen_tag() { return token(0x7467); }
std::string gen_call_id(const std::string& host) { return token(0x6964) + "@" + host; }
std::string gen_nonce() { return token(0x6e6f) + token(0x6e63); }

}  // namespace ipts::sip
