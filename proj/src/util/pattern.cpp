#include "ipts/util/pattern.hpp"

#include <cctype>

#include "ipts/util/strings.hpp"

namespace ipts::util {

bool digit_pattern_match(std::string_view digits, std::string_view pattern) {
    if (digits.empty() || pattern.empty()) return false;
    size_t i = 0;
    for (size_t p = 0; p < pattern.size(); ++p) {
        const char pc = pattern[p];
        if (pc == '.') {
            // Must be the last pattern character and swallow at least one digit.
            return p + 1 == pattern.size() && i < digits.size() &&
                   all_digits(digits.substr(i));
        }
        if (i >= digits.size()) return false;
        const char dc = digits[i++];
        if (pc == 'X' || pc == 'x') {
            if (std::isdigit(static_cast<unsigned char>(dc)) == 0) return false;
        } else if (pc != dc) {
            return false;
        }
    }
    return i == digits.size();
}

bool pattern_is_literal(std::string_view pattern) {
    return pattern.find_first_of("Xx.") == std::string_view::npos;
}

}  // namespace ipts::util
