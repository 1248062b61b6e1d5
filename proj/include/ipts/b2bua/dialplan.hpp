#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipts::b2bua {

enum class DialplanAction { Bridge, Moh, Voicemail, Conference, Ivr };

const char* to_string(DialplanAction a);
std::optional<DialplanAction> dialplan_action_from(std::string_view name);

struct DialplanRule {
    int priority = 0;
    std::string pattern;
    DialplanAction action = DialplanAction::Bridge;
    std::string arg;  // trunk name for Bridge; unused otherwise

    bool operator==(const DialplanRule&) const = default;
};

// Rule lines are "priority,pattern,action[,arg]". Blank lines and lines
// starting with '#' are skipped. Bridge rules must name a trunk; other
// actions take no arg.
std::vector<DialplanRule> parse_dialplan(std::string_view text, const std::string& origin);
std::vector<DialplanRule> load_dialplan(const std::string& path);

// Lowest priority wins among matching rules; at equal priority a literal
// pattern beats a wildcard one, and file order breaks remaining ties.
std::optional<DialplanRule> match_dialplan(const std::string& digits,
                                           const std::vector<DialplanRule>& rules);

// Leading literal digits of the matched pattern are the access prefix and are
// dropped before the digits go to a trunk. A fully literal pattern keeps all
// of them.
std::string strip_pattern_prefix(const std::string& digits, const std::string& pattern);

// Rules mirroring the stock proxy dialplan: external access via "9", rooms
// 30XX, voicemail 4000, IVR 4010, hold music 4020.
std::vector<DialplanRule> default_dialplan();

}  // namespace ipts::b2bua
