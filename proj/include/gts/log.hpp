#pragma once

#include <sstream>
#include <string>

namespace gts {

enum class LogLevel { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

/// Current verbosity, read once from the GTSHAPE_LOG environment variable
/// (off|error|warn|info|debug; default warn).
LogLevel log_level();

void log_message(LogLevel level, const std::string& message);

namespace detail {
template <typename... Args>
std::string log_concat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}
} // namespace detail

template <typename... Args>
void log_info(Args&&... args) {
  if (log_level() >= LogLevel::Info)
    log_message(LogLevel::Info, detail::log_concat(std::forward<Args>(args)...));
}

template <typename... Args>
void log_warn(Args&&... args) {
  if (log_level() >= LogLevel::Warn)
    log_message(LogLevel::Warn, detail::log_concat(std::forward<Args>(args)...));
}

template <typename... Args>
void log_debug(Args&&... args) {
  if (log_level() >= LogLevel::Debug)
    log_message(LogLevel::Debug, detail::log_concat(std::forward<Args>(args)...));
}

} // namespace gts
