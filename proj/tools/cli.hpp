#pragma once

#include <string>
#include <vector>

namespace nflab::cli {

// Full command-line entry point. Returns the process exit status:
// 0 on success, 1 when a suite assertion fails, 2 on usage or config errors.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace nflab::cli
