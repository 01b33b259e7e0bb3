#pragma once

// Command-line front end. Exit codes: 0 the property holds or the task is
// done, 1 the property is refuted, 2 usage/format/shape/precondition errors,
// 3 a conditioning guard tripped.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>

namespace polydil {

/// POLYDIL_SEED when set to an unsigned integer, else 0.
std::uint64_t default_seed();

/// args excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace polydil
