#include "ipts/util/ini.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ipts/util/strings.hpp"

namespace ipts::util {

IniFile IniFile::parse_string(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = std::string(trim(t.substr(1, t.size() - 2)));
            ini.sections_[section];
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string_view::npos) continue;
        std::string key(trim(t.substr(0, eq)));
        std::string value(trim(t.substr(eq + 1)));
        ini.sections_[section].emplace_back(std::move(key), std::move(value));
    }
    return ini;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_string(buf.str());
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return std::nullopt;
    for (const auto& [k, v] : it->second)
        if (k == key) return v;
    return std::nullopt;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    auto v = get(section, key);
    return v ? *v : fallback;
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    auto n = parse_int<int>(*v);
    return n ? *n : fallback;
}

bool IniFile::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

std::vector<std::string> IniFile::section_names() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : sections_) names.push_back(name);
    return names;
}

std::vector<std::pair<std::string, std::string>> IniFile::entries(
    const std::string& section) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return {};
    return it->second;
}

}  // namespace ipts::util
