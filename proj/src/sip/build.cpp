#include "ipts/sip/build.hpp"

#include "ipts/sip/digest.hpp"

namespace ipts::sip {

RequestBuilder::RequestBuilder(SipMethod method, SipUri target) {
    req_.method = std::move(method);
    req_.request_uri = std::move(target);
    cseq_ = "1 " + req_.method.token();
}

RequestBuilder& RequestBuilder::via(const Via& v) {
    via_ = v.to_string();
    return *this;
}
RequestBuilder& RequestBuilder::from(std::string value) {
    from_ = std::move(value);
    return *this;
}
RequestBuilder& RequestBuilder::to(std::string value) {
    to_ = std::move(value);
    return *this;
}
RequestBuilder& RequestBuilder::call_id(std::string value) {
    call_id_ = std::move(value);
    return *this;
}
RequestBuilder& RequestBuilder::cseq(uint32_t number) {
    cseq_ = std::to_string(number) + " " + req_.method.token();
    return *this;
}
RequestBuilder& RequestBuilder::cseq(uint32_t number, SipMethod method) {
    cseq_ = std::to_string(number) + " " + method.token();
    return *this;
}
RequestBuilder& RequestBuilder::contact(std::string value) {
    contact_ = std::move(value);
    return *this;
}
RequestBuilder& RequestBuilder::max_forwards(int hops) {
    max_forwards_ = hops;
    return *this;
}
RequestBuilder& RequestBuilder::header(std::string name, std::string value) {
    extra_.push_back(HeaderField{std::move(name), std::move(value)});
    return *this;
}
RequestBuilder& RequestBuilder::sdp(const SdpBody& body) {
    return this->body("application/sdp", body.to_string());
}
RequestBuilder& RequestBuilder::body(std::string content_type, std::string bytes) {
    extra_.push_back(HeaderField{"Content-Type", std::move(content_type)});
    req_.body = std::move(bytes);
    return *this;
}

SipRequest RequestBuilder::build() const {
    SipRequest req = req_;
    req.headers.clear();
    req.add_header("Via", via_);
    req.add_header("Max-Forwards", std::to_string(max_forwards_));
    req.add_header("From", from_);
    req.add_header("To", to_);
    req.add_header("Call-ID", call_id_);
    req.add_header("CSeq", cseq_);
    if (!contact_.empty()) req.add_header("Contact", contact_);
    for (const auto& h : extra_) req.headers.push_back(h);
    return req;
}

std::string name_addr(const SipUri& uri, const std::string& tag) {
    std::string out = "<" + uri.to_string() + ">";
    if (!tag.empty()) out += ";tag=" + tag;
    return out;
}

bool apply_digest_auth(SipRequest& req, const SipResponse& challenge, std::string_view username,
                       std::string_view password) {
    const bool proxy_flavor = challenge.status.code == 407;
    auto header = challenge.header(proxy_flavor ? "Proxy-Authenticate" : "WWW-Authenticate");
    if (!header) return false;
    auto parsed = DigestChallenge::parse(*header);
    if (!parsed) return false;

    DigestCredentials creds;
    creds.username = std::string(username);
    creds.realm = parsed->realm;
    creds.nonce = parsed->nonce;
    creds.uri = req.request_uri.to_string();
    creds.response = digest_response(digest_ha1(username, parsed->realm, password), parsed->nonce,
                                     req.method.token(), creds.uri);
    req.set_header(proxy_flavor ? "Proxy-Authorization" : "Authorization",
                   creds.to_header_value());
    return true;
}

}  // namespace ipts::sip
