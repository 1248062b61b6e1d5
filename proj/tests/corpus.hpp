#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ipts/sip/message.hpp"

// Fixed corpus of wire messages in canonical form (CRLF, "Name: value",
// Content-Length present), so parse->serialize can be checked byte for byte.
std::vector<std::string> sip_corpus();

// Structured random messages for round-trip property tests. Deterministic per seed.
std::vector<ipts::sip::SipMessage> generated_messages(uint64_t seed, int count);

// Independent line-by-line parse used as the oracle: written against the wire
// format description only, shares no code with ipts::sip::parse_message.
struct OracleMessage {
    bool is_request = false;
    std::string method;   // request
    std::string uri_text;
    int code = 0;         // response
    std::string reason;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::optional<size_t> content_length;
};
std::optional<OracleMessage> oracle_parse(const std::string& raw);

bool messages_equal(const ipts::sip::SipMessage& a, const ipts::sip::SipMessage& b);
