#include "gts/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace gts {

namespace {

LogLevel parse_level(const char* text) {
  if (text == nullptr) return LogLevel::Warn;
  std::string s(text);
  if (s == "off" || s == "0") return LogLevel::Off;
  if (s == "error") return LogLevel::Error;
  if (s == "warn") return LogLevel::Warn;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

const char* level_tag(LogLevel level) {
  switch (level) {
  case LogLevel::Error: return "error";
  case LogLevel::Warn: return "warn";
  case LogLevel::Info: return "info";
  case LogLevel::Debug: return "debug";
  default: return "?";
  }
}

std::mutex log_mutex;

} // namespace

LogLevel log_level() {
  static const LogLevel level = parse_level(std::getenv("GTSHAPE_LOG"));
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "gtshape [" << level_tag(level) << "] " << message << "\n";
}

} // namespace gts
