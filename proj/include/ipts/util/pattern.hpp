#pragma once

#include <string_view>

namespace ipts::util {

// Dialplan-style digit matching: 'X' matches any one digit, a trailing '.'
// matches one or more further digits, anything else matches literally.
// '.' is only meaningful in final position; empty input never matches.
bool digit_pattern_match(std::string_view digits, std::string_view pattern);

// True when the pattern contains no wildcards, i.e. only an exact string
// could match it. Used to break priority ties in favour of literal rules.
bool pattern_is_literal(std::string_view pattern);

}  // namespace ipts::util
