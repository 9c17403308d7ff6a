#pragma once

#include <string_view>

namespace midasvol {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

void set_log_level(LogLevel level);
LogLevel log_level();

// Reads MIDASVOL_LOG ({error,warn,info,debug}); unknown values keep the default.
void set_log_level_from_env();

void log_msg(LogLevel level, std::string_view msg);

inline void log_error(std::string_view msg) { log_msg(LogLevel::error, msg); }
inline void log_warn(std::string_view msg) { log_msg(LogLevel::warn, msg); }
inline void log_info(std::string_view msg) { log_msg(LogLevel::info, msg); }
inline void log_debug(std::string_view msg) { log_msg(LogLevel::debug, msg); }

}  // namespace midasvol
