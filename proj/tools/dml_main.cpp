#include <cstdio>
#include <vector>

#include "dml/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  dml::cli::CommandResult result = dml::cli::run(args);
  if (result.exit_code == 2) {
    std::fputs(result.report.c_str(), stderr);
    if (!result.report.empty() && result.report.back() != '\n') std::fputc('\n', stderr);
  } else {
    std::fputs(result.report.c_str(), stdout);
    if (!result.machine_report.empty()) {
      std::fputc('\n', stdout);
      std::fputs(result.machine_report.c_str(), stdout);
    }
  }
  return result.exit_code;
}
