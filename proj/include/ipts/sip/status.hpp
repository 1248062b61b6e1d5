#pragma once

#include <optional>
#include <string>

namespace ipts::sip {

enum class StatusClass {
    Provisional = 1,
    Success = 2,
    Redirection = 3,
    ClientError = 4,
    ServerError = 5,
    GlobalFailure = 6,
};

struct StatusCode {
    int code = 0;
    std::string reason;

    StatusCode() = default;
    StatusCode(int c, std::string r) : code(c), reason(std::move(r)) {}
    // Uses the conventional reason phrase for the code.
    explicit StatusCode(int c);

    bool operator==(const StatusCode& o) const { return code == o.code; }
};

// Hundreds digit gives the class; codes outside 100..699 have none.
std::optional<StatusClass> classify_status(int code);

const char* default_reason(int code);

}  // namespace ipts::sip
