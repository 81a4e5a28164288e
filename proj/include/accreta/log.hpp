#ifndef ACCRETA_LOG_HPP
#define ACCRETA_LOG_HPP

#include <functional>
#include <string>

namespace accreta {

enum class LogLevel { debug, info, warning };

using LogSink = std::function<void(LogLevel, const std::string&)>;

/// Replaces the process-wide sink; the default prints warnings to stderr.
void set_log_sink(LogSink sink);
void log(LogLevel level, const std::string& message);
inline void log_warning(const std::string& message) { log(LogLevel::warning, message); }
inline void log_info(const std::string& message) { log(LogLevel::info, message); }

}  // namespace accreta

#endif  // ACCRETA_LOG_HPP
