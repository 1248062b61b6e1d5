#include "ipts/sip/message.hpp"

#include "ipts/util/strings.hpp"

namespace ipts::sip {

using util::iequals;
using util::trim;

// ---------------------------------------------------------------- CSeq / Via

std::string CSeq::to_string() const {
    return std::to_string(number) + " " + method.token();
}

std::optional<CSeq> CSeq::parse(std::string_view text) {
    auto parts = util::split_ws(text);
    if (parts.size() != 2) return std::nullopt;
    auto num = util::parse_int<uint32_t>(parts[0]);
    if (!num) return std::nullopt;
    return CSeq{*num, SipMethod::from_token(parts[1])};
}

std::string Via::branch() const {
    for (const auto& [k, v] : params)
        if (k == "branch") return v;
    return "";
}

std::string Via::to_string() const {
    std::string out = "SIP/2.0/" + transport + " " + host + ":" + std::to_string(port);
    for (const auto& [k, v] : params) {
        out += ";" + k;
        if (!v.empty()) out += "=" + v;
    }
    return out;
}

std::optional<Via> Via::parse(std::string_view text) {
    text = trim(text);
    if (!text.starts_with("SIP/2.0/")) return std::nullopt;
    text.remove_prefix(8);
    size_t sp = text.find(' ');
    if (sp == std::string_view::npos) return std::nullopt;
    Via via;
    via.transport = std::string(text.substr(0, sp));
    std::string_view rest = trim(text.substr(sp + 1));
    size_t semi = rest.find(';');
    std::string_view hostport = rest.substr(0, semi);
    if (semi != std::string_view::npos) {
        for (const auto& p : util::split(rest.substr(semi + 1), ';')) {
            size_t eq = p.find('=');
            if (eq == std::string::npos)
                via.params.emplace_back(std::string(trim(p)), "");
            else
                via.params.emplace_back(std::string(trim(p.substr(0, eq))),
                                        std::string(trim(p.substr(eq + 1))));
        }
    }
    size_t colon = hostport.find(':');
    if (colon == std::string_view::npos) {
        via.host = std::string(hostport);
        via.port = 5060;
    } else {
        via.host = std::string(hostport.substr(0, colon));
        auto port = util::parse_int<uint16_t>(hostport.substr(colon + 1));
        if (!port) return std::nullopt;
        via.port = *port;
    }
    if (via.host.empty()) return std::nullopt;
    return via;
}

// ---------------------------------------------------------------- headers

std::optional<std::string> MessageBase::header(std::string_view name) const {
    for (const auto& h : headers)
        if (iequals(h.name, name)) return h.value;
    return std::nullopt;
}

std::vector<std::string> MessageBase::header_values(std::string_view name) const {
    std::vector<std::string> out;
    for (const auto& h : headers)
        if (iequals(h.name, name)) out.push_back(h.value);
    return out;
}

void MessageBase::set_header(std::string_view name, std::string value) {
    for (auto& h : headers) {
        if (iequals(h.name, name)) {
            h.value = std::move(value);
            return;
        }
    }
    headers.push_back(HeaderField{std::string(name), std::move(value)});
}

void MessageBase::add_header(std::string_view name, std::string value) {
    headers.push_back(HeaderField{std::string(name), std::move(value)});
}

void MessageBase::remove_header(std::string_view name) {
    std::erase_if(headers, [&](const HeaderField& h) { return iequals(h.name, name); });
}

bool MessageBase::has_header(std::string_view name) const {
    return header(name).has_value();
}

std::vector<std::string> MessageBase::vias() const {
    // Via is the one header we accept in comma-combined form.
    std::vector<std::string> out;
    for (const auto& h : headers) {
        if (!iequals(h.name, "Via")) continue;
        for (const auto& part : util::split(h.value, ','))
            out.emplace_back(trim(part));
    }
    return out;
}

std::optional<Via> MessageBase::top_via() const {
    auto all = vias();
    if (all.empty()) return std::nullopt;
    return Via::parse(all.front());
}

void MessageBase::push_via(const Via& via) {
    for (size_t i = 0; i < headers.size(); ++i) {
        if (iequals(headers[i].name, "Via")) {
            headers.insert(headers.begin() + i, HeaderField{"Via", via.to_string()});
            return;
        }
    }
    headers.insert(headers.begin(), HeaderField{"Via", via.to_string()});
}

void MessageBase::pop_via() {
    for (size_t i = 0; i < headers.size(); ++i) {
        if (!iequals(headers[i].name, "Via")) continue;
        size_t comma = headers[i].value.find(',');
        if (comma == std::string::npos) {
            headers.erase(headers.begin() + i);
        } else {
            headers[i].value = std::string(trim(std::string_view(headers[i].value).substr(comma + 1)));
        }
        return;
    }
}

std::optional<CSeq> MessageBase::cseq() const {
    auto v = header("CSeq");
    if (!v) return std::nullopt;
    return CSeq::parse(*v);
}

std::optional<int> MessageBase::max_forwards() const {
    auto v = header("Max-Forwards");
    if (!v) return std::nullopt;
    return util::parse_int<int>(trim(*v));
}

// ---------------------------------------------------------------- parse

namespace {

ParseResult parse_error(ParseErrorKind kind, std::string detail) {
    return ParseError{kind, std::move(detail)};
}

bool parse_headers(std::string_view block, std::vector<HeaderField>& out) {
    size_t pos = 0;
    while (pos < block.size()) {
        size_t eol = block.find("\r\n", pos);
        std::string_view line = eol == std::string_view::npos ? block.substr(pos)
                                                              : block.substr(pos, eol - pos);
        if (!line.empty()) {
            size_t colon = line.find(':');
            if (colon == std::string_view::npos || colon == 0) return false;
            out.push_back(HeaderField{std::string(trim(line.substr(0, colon))),
                                      std::string(trim(line.substr(colon + 1)))});
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 2;
    }
    return true;
}

}  // namespace

ParseResult parse_message(std::string_view raw) {
    size_t line_end = raw.find("\r\n");
    if (line_end == std::string_view::npos)
        return parse_error(ParseErrorKind::MalformedStartLine, "no CRLF in message");
    std::string_view start_line = raw.substr(0, line_end);
    if (start_line.empty())
        return parse_error(ParseErrorKind::MalformedStartLine, "empty start line");

    size_t hdr_end = raw.find("\r\n\r\n", line_end);
    std::string_view header_block;
    std::string_view body;
    if (hdr_end == std::string_view::npos) {
        header_block = raw.substr(line_end + 2);
    } else {
        header_block = raw.substr(line_end + 2, hdr_end - line_end - 2);
        body = raw.substr(hdr_end + 4);
    }

    std::vector<HeaderField> headers;
    if (!parse_headers(header_block, headers))
        return parse_error(ParseErrorKind::MalformedStartLine, "bad header line");

    std::optional<size_t> content_length;
    for (const auto& h : headers) {
        if (iequals(h.name, "Content-Length")) {
            auto v = util::parse_int<size_t>(trim(h.value));
            if (!v) return parse_error(ParseErrorKind::BodyLengthMismatch,
                                       "unparseable Content-Length");
            content_length = *v;
            break;
        }
    }
    if (content_length && *content_length != body.size())
        return parse_error(ParseErrorKind::BodyLengthMismatch,
                           "Content-Length " + std::to_string(*content_length) + " but body has " +
                               std::to_string(body.size()) + " bytes");

    if (start_line.starts_with("SIP/2.0 ")) {
        std::string_view rest = start_line.substr(8);
        size_t sp = rest.find(' ');
        std::string_view code_part = sp == std::string_view::npos ? rest : rest.substr(0, sp);
        auto code = util::parse_int<int>(code_part);
        if (!code || !classify_status(*code))
            return parse_error(ParseErrorKind::MalformedStartLine, "bad status code");
        SipResponse resp;
        resp.status.code = *code;
        resp.status.reason =
            sp == std::string_view::npos ? "" : std::string(rest.substr(sp + 1));
        resp.headers = std::move(headers);
        resp.body = std::string(body);
        return resp;
    }

    // Request-line: METHOD SP Request-URI SP SIP/2.0
    auto parts = util::split_ws(start_line);
    if (parts.size() != 3 || parts[2] != "SIP/2.0")
        return parse_error(ParseErrorKind::MalformedStartLine, std::string(start_line));
    auto uri = SipUri::parse(parts[1]);
    if (!uri) return parse_error(ParseErrorKind::MalformedUri, parts[1]);
    SipRequest req;
    req.method = SipMethod::from_token(parts[0]);
    req.request_uri = *uri;
    req.headers = std::move(headers);
    req.body = std::string(body);
    return req;
}

// ---------------------------------------------------------------- serialize

namespace {

std::string serialize_common(std::string start_line, const MessageBase& msg) {
    std::string out = std::move(start_line);
    out += "\r\n";
    bool wrote_content_length = false;
    for (const auto& h : msg.headers) {
        if (iequals(h.name, "Content-Length")) {
            if (wrote_content_length) continue;
            out += h.name + ": " + std::to_string(msg.body.size()) + "\r\n";
            wrote_content_length = true;
            continue;
        }
        out += h.name + ": " + h.value + "\r\n";
    }
    if (!wrote_content_length)
        out += "Content-Length: " + std::to_string(msg.body.size()) + "\r\n";
    out += "\r\n";
    out += msg.body;
    return out;
}

}  // namespace

std::string serialize_message(const SipRequest& req) {
    return serialize_common(req.method.token() + " " + req.request_uri.to_string() + " SIP/2.0",
                            req);
}

std::string serialize_message(const SipResponse& resp) {
    std::string reason =
        resp.status.reason.empty() ? default_reason(resp.status.code) : resp.status.reason;
    return serialize_common("SIP/2.0 " + std::to_string(resp.status.code) + " " + reason, resp);
}

std::string serialize_message(const SipMessage& msg) {
    if (std::holds_alternative<SipRequest>(msg))
        return serialize_message(std::get<SipRequest>(msg));
    return serialize_message(std::get<SipResponse>(msg));
}

// ---------------------------------------------------------------- validation

namespace {
const char* kMandatory[] = {"Via", "From", "To", "Call-ID", "CSeq"};
}

std::optional<std::string> missing_mandatory_header(const SipRequest& req) {
    for (const char* name : kMandatory)
        if (!req.has_header(name)) return std::string(name);
    if (!req.has_header("Max-Forwards")) return std::string("Max-Forwards");
    return std::nullopt;
}

std::optional<std::string> missing_mandatory_header(const SipResponse& resp) {
    for (const char* name : kMandatory)
        if (!resp.has_header(name)) return std::string(name);
    return std::nullopt;
}

SipResponse build_response(const SipRequest& req, StatusCode code) {
    SipResponse resp;
    resp.status = std::move(code);
    for (const auto& h : req.headers) {
        if (iequals(h.name, "Via") || iequals(h.name, "From") || iequals(h.name, "To") ||
            iequals(h.name, "Call-ID") || iequals(h.name, "CSeq") ||
            iequals(h.name, "Record-Route"))
            resp.headers.push_back(h);
    }
    // Final responses carry a To tag so the dialog can be identified.
    if (resp.status.code >= 200) {
        auto to = resp.header("To");
        if (to && tag_of(*to).empty()) {
            // Tag derived from the request so retransmitted requests get the same tag.
            std::string tag = std::to_string(
                std::hash<std::string>()(req.call_id() + req.header("CSeq").value_or("")) & 0xffffff);
            resp.set_header("To", with_tag(*to, tag));
        }
    }
    return resp;
}

// ---------------------------------------------------------------- name-addr helpers

std::optional<SipUri> uri_of(std::string_view header_value) {
    std::string_view v = trim(header_value);
    size_t lt = v.find('<');
    if (lt != std::string_view::npos) {
        size_t gt = v.find('>', lt);
        if (gt == std::string_view::npos) return std::nullopt;
        return SipUri::parse(v.substr(lt + 1, gt - lt - 1));
    }
    // addr-spec form: URI ends at the first header parameter separator
    size_t semi = v.find(';');
    return SipUri::parse(semi == std::string_view::npos ? v : v.substr(0, semi));
}

namespace {
// Parameters that belong to the header (after '>' for name-addr forms).
std::string_view header_params_part(std::string_view v) {
    size_t gt = v.find('>');
    size_t start = gt == std::string_view::npos ? 0 : gt + 1;
    size_t semi = v.find(';', start);
    if (semi == std::string_view::npos) return {};
    return v.substr(semi + 1);
}
}  // namespace

std::string tag_of(std::string_view header_value) {
    return header_param(header_value, "tag").value_or("");
}

std::optional<std::string> header_param(std::string_view header_value, std::string_view name) {
    for (const auto& p : util::split(header_params_part(header_value), ';')) {
        auto pv = trim(p);
        size_t eq = pv.find('=');
        std::string_view key = eq == std::string_view::npos ? pv : pv.substr(0, eq);
        if (iequals(key, name))
            return std::string(eq == std::string_view::npos ? "" : trim(pv.substr(eq + 1)));
    }
    return std::nullopt;
}

std::string with_tag(std::string_view header_value, std::string_view tag) {
    if (!tag_of(header_value).empty()) return std::string(header_value);
    std::string out(header_value);
    out += ";tag=";
    out += tag;
    return out;
}

}  // namespace ipts::sip
