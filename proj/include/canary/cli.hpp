#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace canary {

/// Exit codes: 0 success, 1 unexpected failure or a failed check, 2 usage or
/// configuration error, 3 bad input data, 4 transport failure, 5 token
/// space exhausted.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace canary
