#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ipts/sip/method.hpp"
#include "ipts/sip/status.hpp"
#include "ipts/sip/uri.hpp"

namespace ipts::sip {

// Name comparison is case-insensitive; original casing and wire order are kept.
struct HeaderField {
    std::string name;
    std::string value;
    bool operator==(const HeaderField&) const = default;
};

struct CSeq {
    uint32_t number = 0;
    SipMethod method;
    std::string to_string() const;
    static std::optional<CSeq> parse(std::string_view text);
    bool operator==(const CSeq& o) const { return number == o.number && method == o.method; }
};

struct Via {
    std::string transport = "UDP";
    std::string host;
    uint16_t port = 5060;
    std::vector<std::pair<std::string, std::string>> params;

    std::string branch() const;
    std::string to_string() const;
    static std::optional<Via> parse(std::string_view text);
};

class MessageBase {
public:
    std::vector<HeaderField> headers;
    std::string body;

    std::optional<std::string> header(std::string_view name) const;
    std::vector<std::string> header_values(std::string_view name) const;
    void set_header(std::string_view name, std::string value);   // replace first or append
    void add_header(std::string_view name, std::string value);   // append preserving order
    void remove_header(std::string_view name);                   // all occurrences
    bool has_header(std::string_view name) const;

    // Via stack, flattening comma-combined values in wire order.
    std::vector<std::string> vias() const;
    std::optional<Via> top_via() const;
    void push_via(const Via& via);  // becomes the topmost
    void pop_via();                 // removes the topmost

    std::string call_id() const { return header("Call-ID").value_or(""); }
    std::optional<CSeq> cseq() const;
    std::optional<int> max_forwards() const;

    std::string from_value() const { return header("From").value_or(""); }
    std::string to_value() const { return header("To").value_or(""); }
};

struct SipRequest : MessageBase {
    SipMethod method;
    SipUri request_uri;
};

struct SipResponse : MessageBase {
    StatusCode status;
};

using SipMessage = std::variant<SipRequest, SipResponse>;

enum class ParseErrorKind {
    MalformedStartLine,
    MissingMandatoryHeader,
    BodyLengthMismatch,
    MalformedUri,
    MalformedSdp,
};

struct ParseError {
    ParseErrorKind kind;
    std::string detail;
};

using ParseResult = std::variant<SipRequest, SipResponse, ParseError>;

ParseResult parse_message(std::string_view raw);

std::string serialize_message(const SipRequest& req);
std::string serialize_message(const SipResponse& resp);
std::string serialize_message(const SipMessage& msg);

// Headers every routable message must carry. Returns the first missing name.
std::optional<std::string> missing_mandatory_header(const SipRequest& req);
std::optional<std::string> missing_mandatory_header(const SipResponse& resp);

// Response construction: copies Via stack, From, To, Call-ID, CSeq from the
// request; final responses get a To tag when the request had none.
SipResponse build_response(const SipRequest& req, StatusCode code);

// ---- header value helpers (From/To/Contact shapes) ----

// Extracts the URI from a name-addr or addr-spec header value.
std::optional<SipUri> uri_of(std::string_view header_value);
// Value of ;tag= on a From/To header, empty if absent.
std::string tag_of(std::string_view header_value);
// Appends ;tag= if the value has none.
std::string with_tag(std::string_view header_value, std::string_view tag);
// Value of a ;name= parameter trailing a header value (e.g. Contact expires).
std::optional<std::string> header_param(std::string_view header_value, std::string_view name);

}  // namespace ipts::sip
