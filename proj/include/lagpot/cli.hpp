#pragma once

// Batch driver. Subcommands: eval, crosscheck, oracle, pluriharmonic,
// boundary, solve, freeness, hull. Exit codes: 0 success, 1 computational
// failure on validated input (error.json written), 2 config or parse error.
// Every run that gets as far as an output directory writes manifest.json.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lagpot::cli {

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace lagpot::cli
