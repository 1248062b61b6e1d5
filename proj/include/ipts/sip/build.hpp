#pragma once

#include <string>

#include "ipts/sip/message.hpp"
#include "ipts/sip/sdp.hpp"

namespace ipts::sip {

// Assembles requests with the mandatory header set in conventional order.
class RequestBuilder {
public:
    RequestBuilder(SipMethod method, SipUri target);

    RequestBuilder& via(const Via& v);
    RequestBuilder& from(std::string value);
    RequestBuilder& to(std::string value);
    RequestBuilder& call_id(std::string value);
    RequestBuilder& cseq(uint32_t number);
    RequestBuilder& cseq(uint32_t number, SipMethod method);  // CANCEL/ACK reuse INVITE's number
    RequestBuilder& contact(std::string value);
    RequestBuilder& max_forwards(int hops);
    RequestBuilder& header(std::string name, std::string value);
    RequestBuilder& sdp(const SdpBody& body);
    RequestBuilder& body(std::string content_type, std::string bytes);

    SipRequest build() const;

private:
    SipRequest req_;
    std::string via_, from_, to_, call_id_, cseq_, contact_;
    int max_forwards_ = 70;
    std::vector<HeaderField> extra_;
};

// Convenience for From/To values: "<sip:2001@host>" with optional tag.
std::string name_addr(const SipUri& uri, const std::string& tag = "");

// Answers a 401/407 by attaching the matching Authorization header to req,
// computed for req's own method and request URI. False when the challenge
// response carries no parsable challenge.
bool apply_digest_auth(SipRequest& req, const SipResponse& challenge, std::string_view username,
                       std::string_view password);

}  // namespace ipts::sip
