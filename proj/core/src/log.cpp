#include "robopainter/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace robopainter {

namespace {

LogLevel parse_env_level() {
  const char* env = std::getenv("ROBOPAINTER_LOG_LEVEL");
  if (!env) return LogLevel::Warn;
  if (std::strcmp(env, "error") == 0) return LogLevel::Error;
  if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
  if (std::strcmp(env, "info") == 0) return LogLevel::Info;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  return LogLevel::Warn;
}

LogLevel& current_level() {
  static LogLevel level = parse_env_level();
  return level;
}

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
  }
  return "?";
}

}  // namespace

LogLevel log_level() { return current_level(); }

void set_log_level(LogLevel level) { current_level() = level; }

void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(current_level())) return;
  std::fprintf(stderr, "[%s] %s\n", tag(level), msg.c_str());
}

}  // namespace robopainter
