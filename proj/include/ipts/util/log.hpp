#pragma once

#include <sstream>
#include <string>
#include <string_view>

namespace ipts::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

void set_level(Level lvl);
Level level();
bool set_level_by_name(std::string_view name);  // "debug" | "info" | "warn" | "error" | "off"

// Optional tag prepended to every line, e.g. the actor name in harness runs.
void set_tag(std::string tag);

void write(Level lvl, const std::string& msg);

template <typename... Args>
std::string cat(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}

template <typename... Args>
void debug(Args&&... args) {
    if (level() <= Level::Debug) write(Level::Debug, cat(std::forward<Args>(args)...));
}
template <typename... Args>
void info(Args&&... args) {
    if (level() <= Level::Info) write(Level::Info, cat(std::forward<Args>(args)...));
}
template <typename... Args>
void warn(Args&&... args) {
    if (level() <= Level::Warn) write(Level::Warn, cat(std::forward<Args>(args)...));
}
template <typename... Args>
void error(Args&&... args) {
    if (level() <= Level::Error) write(Level::Error, cat(std::forward<Args>(args)...));
}

}  // namespace ipts::log
