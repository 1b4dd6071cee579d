// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_LOG_HPP
#define INTENTFORGE_CORE_LOG_HPP

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

namespace intentforge {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Verbosity comes from IF_LOG={error,info,debug}; default error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("IF_LOG");
    if (env == nullptr) return LogLevel::kError;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    return LogLevel::kError;
  }();
  return level;
}

inline void log_msg(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::kError ? "error" : level == LogLevel::kInfo ? "info" : "debug";
  std::cerr << "[intentforge " << tag << "] " << msg << "\n";
}

#define IF_LOG_INFO(msg)                         \
  do {                                           \
    std::ostringstream os_;                      \
    os_ << msg;                                  \
    ::intentforge::log_msg(::intentforge::LogLevel::kInfo, os_.str()); \
  } while (0)

#define IF_LOG_DEBUG(msg)                        \
  do {                                           \
    std::ostringstream os_;                      \
    os_ << msg;                                  \
    ::intentforge::log_msg(::intentforge::LogLevel::kDebug, os_.str()); \
  } while (0)

#define IF_LOG_ERROR(msg)                        \
  do {                                           \
    std::ostringstream os_;                      \
    os_ << msg;                                  \
    ::intentforge::log_msg(::intentforge::LogLevel::kError, os_.str()); \
  } while (0)

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_LOG_HPP
