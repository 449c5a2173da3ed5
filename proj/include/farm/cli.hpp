#pragma once

#include <string>
#include <vector>

namespace farm {

// Parses and runs one command-line invocation (argv[0] = program name).
// Returns 0 on success, 1 when the run completed but some sample failed,
// and 2 on configuration or usage errors.
int execute(std::vector<std::string> argv);

}  // namespace farm
