#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gauss_counter::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 2,
    exit_numerical = 3,
    exit_roundtrip_failed = 4,
};

/// Runs one command line (without the program name). `in` backs "-" inputs,
/// `out` receives results and `err` receives error JSON and diagnostics.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace gauss_counter::cli
