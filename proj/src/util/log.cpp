#include "ipts/util/log.hpp"

#include <cstdio>
#include <ctime>

namespace ipts::log {

namespace {
Level g_level = Level::Info;
std::string g_tag;

const char* level_name(Level l) {
    switch (l) {
        case Level::Debug: return "DBG";
        case Level::Info: return "INF";
        case Level::Warn: return "WRN";
        case Level::Error: return "ERR";
        default: return "???";
    }
}
}  // namespace

void set_level(Level lvl) { g_level = lvl; }
Level level() { return g_level; }
void set_tag(std::string tag) { g_tag = std::move(tag); }

bool set_level_by_name(std::string_view name) {
    if (name == "debug") g_level = Level::Debug;
    else if (name == "info") g_level = Level::Info;
    else if (name == "warn") g_level = Level::Warn;
    else if (name == "error") g_level = Level::Error;
    else if (name == "off") g_level = Level::Off;
    else return false;
    return true;
}

void write(Level lvl, const std::string& msg) {
    struct timespec ts;
    clock_gettime(CLOCK_REALTIME, &ts);
    struct tm tm;
    localtime_r(&ts.tv_sec, &tm);
    char stamp[32];
    snprintf(stamp, sizeof(stamp), "%02d:%02d:%02d.%03ld", tm.tm_hour, tm.tm_min, tm.tm_sec,
             ts.tv_nsec / 1000000);
    if (g_tag.empty())
        fprintf(stderr, "%s %s %s\n", stamp, level_name(lvl), msg.c_str());
    else
        fprintf(stderr, "%s %s [%s] %s\n", stamp, level_name(lvl), g_tag.c_str(), msg.c_str());
}

}  // namespace ipts::log
