// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_COMMANDS_HPP
#define INTENTFORGE_CORE_COMMANDS_HPP

#include <cstdint>
#include <string>

namespace intentforge {

// Subcommand entry points shared by the C API and the CLI. Each takes the
// merged JSON config text plus the root seed and returns a JSON summary.
// Errors surface as ConfigError / ValidationError / DomainError.

std::string run_gen_fixture(const std::string& config_json, std::uint64_t seed);
std::string run_extract(const std::string& config_json, std::uint64_t seed);
std::string run_train_mdb(const std::string& config_json, std::uint64_t seed);
std::string run_train_pgt(const std::string& config_json, std::uint64_t seed);
std::string run_induce(const std::string& config_json, std::uint64_t seed);
std::string run_evaluate(const std::string& config_json, std::uint64_t seed);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_COMMANDS_HPP
