#include "ipts/sip/status.hpp"

namespace ipts::sip {

std::optional<StatusClass> classify_status(int code) {
    if (code < 100 || code > 699) return std::nullopt;
    return static_cast<StatusClass>(code / 100);
}

const char* default_reason(int code) {
    switch (code) {
        case 100: return "Trying";
        case 180: return "Ringing";
        case 181: return "Call Is Being Forwarded";
        case 183: return "Session Progress";
        case 200: return "OK";
        case 202: return "Accepted";
        case 300: return "Multiple Choices";
        case 301: return "Moved Permanently";
        case 302: return "Moved Temporarily";
        case 400: return "Bad Request";
        case 401: return "Unauthorized";
        case 403: return "Forbidden";
        case 404: return "Not Found";
        case 405: return "Method Not Allowed";
        case 407: return "Proxy Authentication Required";
        case 408: return "Request Timeout";
        case 413: return "Request Entity Too Large";
        case 415: return "Unsupported Media Type";
        case 423: return "Interval Too Brief";
        case 480: return "Temporarily Unavailable";
        case 481: return "Call/Transaction Does Not Exist";
        case 482: return "Loop Detected";
        case 483: return "Too Many Hops";
        case 486: return "Busy Here";
        case 487: return "Request Terminated";
        case 488: return "Not Acceptable Here";
        case 500: return "Server Internal Error";
        case 501: return "Not Implemented";
        case 503: return "Service Unavailable";
        case 600: return "Busy Everywhere";
        case 603: return "Decline";
        case 604: return "Does Not Exist Anywhere";
        case 606: return "Not Acceptable";
        default: break;
    }
    auto cls = classify_status(code);
    if (!cls) return "Unknown";
    switch (*cls) {
        case StatusClass::Provisional: return "Provisional";
        case StatusClass::Success: return "Success";
        case StatusClass::Redirection: return "Redirection";
        case StatusClass::ClientError: return "Client Error";
        case StatusClass::ServerError: return "Server Error";
        case StatusClass::GlobalFailure: return "Global Failure";
    }
    return "Unknown";
}

StatusCode::StatusCode(int c) : code(c), reason(default_reason(c)) {}

}  // namespace ipts::sip
