#pragma once

#include <string>
#include <utility>
#include <vector>

namespace treeviz {

// Parses "outcome ~ cov1 + cov2 + ..." into trimmed identifiers.
std::pair<std::string, std::vector<std::string>> parse_formula(
    const std::string& text);

// CLI entry point. Exit codes: 0 success, 1 usage error, 2 data/model error.
int run(int argc, const char* const* argv);

}  // namespace treeviz
