#pragma once

#include <string>
#include <vector>

/// Full CLI entry point, callable from tests with an argument vector
/// (excluding the program name). Exit codes: 0 success, 2 configuration
/// error, 3 numerical failure.
int cfoed_cli_main(const std::vector<std::string>& args);
