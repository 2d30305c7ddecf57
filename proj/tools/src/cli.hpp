#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sifair::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kRuntime = 3,
  kOutputsExist = 4,
  kTheoremFailed = 5,
};

/// Entry point without argv[0].
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sifair::cli
