#pragma once

// Reduced-scale property suites run by `<subcommand> --selftest`.

#include <cstdint>
#include <iosfwd>
#include <string>

namespace invlayers::tool {

// Returns true when every check passed. One line per check goes to `out`.
bool run_selftest(const std::string& subcommand, std::uint64_t seed, std::ostream& out);

}  // namespace invlayers::tool
