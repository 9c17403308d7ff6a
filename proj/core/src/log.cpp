#include "midasvol/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace midasvol {

namespace {

std::atomic<int> g_level{static_cast<int>(LogLevel::warn)};

const char* tag(LogLevel l) {
    switch (l) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(static_cast<int>(level)); }

LogLevel log_level() { return static_cast<LogLevel>(g_level.load()); }

void set_log_level_from_env() {
    const char* v = std::getenv("MIDASVOL_LOG");
    if (!v) return;
    std::string s(v);
    if (s == "error") set_log_level(LogLevel::error);
    else if (s == "warn") set_log_level(LogLevel::warn);
    else if (s == "info") set_log_level(LogLevel::info);
    else if (s == "debug") set_log_level(LogLevel::debug);
}

void log_msg(LogLevel level, std::string_view msg) {
    if (static_cast<int>(level) > g_level.load()) return;
    std::fprintf(stderr, "[midasvol %s] %.*s\n", tag(level),
                 static_cast<int>(msg.size()), msg.data());
}

}  // namespace midasvol
