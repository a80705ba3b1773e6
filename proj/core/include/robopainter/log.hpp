#pragma once

#include <string>

namespace robopainter {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from ROBOPAINTER_LOG_LEVEL (error|warn|info|debug), default warn.
LogLevel log_level();
void set_log_level(LogLevel level);

void log(LogLevel level, const std::string& msg);

inline void log_error(const std::string& m) { log(LogLevel::Error, m); }
inline void log_warn(const std::string& m) { log(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log(LogLevel::Debug, m); }

}  // namespace robopainter
