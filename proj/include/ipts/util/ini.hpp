#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ipts::util {

// INI-style config: [section] headers, key = value lines, # or ; comments.
class IniFile {
public:
    static IniFile parse_string(const std::string& text);
    static IniFile load(const std::string& path);  // throws std::runtime_error if unreadable

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool has_section(const std::string& section) const;
    std::vector<std::string> section_names() const;
    // All keys of a section in file order (used for IVR digit maps and dialplans).
    std::vector<std::pair<std::string, std::string>> entries(const std::string& section) const;

private:
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

}  // namespace ipts::util
