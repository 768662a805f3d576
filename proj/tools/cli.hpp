#pragma once

#include <string>
#include <vector>

namespace winshift {

// Entry point shared by the binary and the CLI tests. Returns the process
// exit status: 0 success, 2 validation failure, 3 numerical failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace winshift
