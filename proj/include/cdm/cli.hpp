#pragma once

#include <string>
#include <vector>

namespace cdm::cli {

/// Exit codes: 0 success, 1 some input failed, 2 usage or configuration error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace cdm::cli
