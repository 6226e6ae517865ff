// Command-line front end: gen, run, audit and bench subcommands.
//
// Exit codes: 0 pass, 1 check failure, 2 usage or format error.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lazypair/types.hpp"

namespace lazypair::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same as above; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "lazy", "eager", "lazy-nomeld", "lazy-periodic" or "lazy-direct".
std::optional<VariantConfig> parse_variant(std::string_view name);

}  // namespace lazypair::cli
