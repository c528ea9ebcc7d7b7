// commands.hpp
// CLI entry point, separated from main() so the test suite can drive it.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rank1lab::cli {

// Exit codes: 0 success, 1 property violation found, 2 usage/domain error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rank1lab::cli
