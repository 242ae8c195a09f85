#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lqg {
namespace cli {

/// Entry point of the lqgibbs tool. Returns the process exit code:
/// 0 success, 2 solver non-convergence, 3 parse or validation failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace lqg
