#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cvqec::cli {

enum ExitCode { ok = 0, bad_arguments = 2, numerical_failure = 3, io_failure = 4 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 9 significant digits with a '.' radix regardless of locale.
std::string format_number(double value);

}  // namespace cvqec::cli
