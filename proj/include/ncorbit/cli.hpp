#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ncorbit::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kInvalidInput = 2 };

// Directory holding constants.txt and mercury.obs. Honours NCORBIT_DATA_DIR.
std::filesystem::path data_dir();

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncorbit::cli
