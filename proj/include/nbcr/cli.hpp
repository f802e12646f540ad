#ifndef NBCR_CLI_HPP
#define NBCR_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nbcr::cli {

enum ExitCode : int {
    Success = 0,
    Usage = 2,
    DegenerateSample = 3,
    EmptyResult = 4,
};

/// Whitespace- or comma-separated nonnegative base-10 integers; `#` starts a
/// comment running to the end of the line. Throws Error(Parse) on a bad token
/// or fewer than two counts.
std::vector<std::int64_t> parse_counts(std::string_view text);

/// Entry point behind the `nbcr` executable; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nbcr::cli

#endif // NBCR_CLI_HPP
