// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_ERRORS_HPP
#define INTENTFORGE_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace intentforge {

// Contract violations on inputs (bad shapes, bad labels, malformed files).
// Mapped to exit code 2 / IFX_ERR_VALIDATION at the C boundary.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Mathematically undefined requests (zero-norm row under cosine, silhouette
// of a single cluster). Also exit code 2.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Unusable configuration (missing checkpoint, unresolvable path, batch size
// below dataset count). Mapped to exit code 3 / IFX_ERR_CONFIG.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_ERRORS_HPP
