#include "ipts/b2bua/dialplan.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ipts/util/pattern.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::b2bua {

const char* to_string(DialplanAction a) {
    switch (a) {
        case DialplanAction::Bridge: return "bridge";
        case DialplanAction::Moh: return "moh";
        case DialplanAction::Voicemail: return "voicemail";
        case DialplanAction::Conference: return "conference";
        case DialplanAction::Ivr: return "ivr";
    }
    return "?";
}

std::optional<DialplanAction> dialplan_action_from(std::string_view name) {
    if (name == "bridge") return DialplanAction::Bridge;
    if (name == "moh") return DialplanAction::Moh;
    if (name == "voicemail") return DialplanAction::Voicemail;
    if (name == "conference") return DialplanAction::Conference;
    if (name == "ivr") return DialplanAction::Ivr;
    return std::nullopt;
}

namespace {

[[noreturn]] void fail(const std::string& origin, int line_no, const std::string& what) {
    throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + what);
}

bool valid_pattern(std::string_view p) {
    if (p.empty()) return false;
    for (size_t i = 0; i < p.size(); ++i) {
        char c = p[i];
        if (c >= '0' && c <= '9') continue;
        if (c == 'X' || c == 'x') continue;
        if (c == '.' && i + 1 == p.size()) continue;
        return false;
    }
    return true;
}

}  // namespace

std::vector<DialplanRule> parse_dialplan(std::string_view text, const std::string& origin) {
    std::vector<DialplanRule> rules;
    int line_no = 0;
    for (const auto& raw : util::split(text, '\n')) {
        ++line_no;
        auto line = util::trim(raw);
        if (line.empty() || line.front() == '#') continue;

        auto fields = util::split(line, ',');
        if (fields.size() < 3 || fields.size() > 4)
            fail(origin, line_no, "expected priority,pattern,action[,arg]");

        DialplanRule rule;
        auto prio = util::parse_int<int>(util::trim(fields[0]));
        if (!prio) fail(origin, line_no, "bad priority: " + fields[0]);
        rule.priority = *prio;

        rule.pattern = std::string(util::trim(fields[1]));
        if (!valid_pattern(rule.pattern))
            fail(origin, line_no, "bad pattern: " + rule.pattern);

        auto action = dialplan_action_from(util::trim(fields[2]));
        if (!action) fail(origin, line_no, "unknown action: " + fields[2]);
        rule.action = *action;

        if (fields.size() == 4) rule.arg = std::string(util::trim(fields[3]));
        if (rule.action == DialplanAction::Bridge && rule.arg.empty())
            fail(origin, line_no, "bridge rule needs a trunk name");
        if (rule.action != DialplanAction::Bridge && !rule.arg.empty())
            fail(origin, line_no, "unexpected arg for " + std::string(to_string(rule.action)));

        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<DialplanRule> load_dialplan(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open dialplan file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_dialplan(buf.str(), path);
}

std::optional<DialplanRule> match_dialplan(const std::string& digits,
                                           const std::vector<DialplanRule>& rules) {
    const DialplanRule* best = nullptr;
    int best_rank = 0;
    for (const auto& rule : rules) {
        if (!util::digit_pattern_match(digits, rule.pattern)) continue;
        int rank = util::pattern_is_literal(rule.pattern) ? 0 : 1;
        if (!best || rule.priority < best->priority ||
            (rule.priority == best->priority && rank < best_rank)) {
            best = &rule;
            best_rank = rank;
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

std::string strip_pattern_prefix(const std::string& digits, const std::string& pattern) {
    size_t literal = 0;
    while (literal < pattern.size() && pattern[literal] >= '0' && pattern[literal] <= '9')
        ++literal;
    if (literal == pattern.size()) return digits;  // fully literal, nothing to strip
    if (literal >= digits.size()) return digits;
    return digits.substr(literal);
}

std::vector<DialplanRule> default_dialplan() {
    return {
        {10, "9X.", DialplanAction::Bridge, "trunk"},
        {20, "30XX", DialplanAction::Conference, ""},
        {30, "4000", DialplanAction::Voicemail, ""},
        {40, "4010", DialplanAction::Ivr, ""},
        {50, "4020", DialplanAction::Moh, ""},
    };
}

}  // namespace ipts::b2bua
