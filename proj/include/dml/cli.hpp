#pragma once

#include <string>
#include <vector>

// Command-line front end. run() never exits the process; exit codes are
// 0 (success), 1 (violation or verification failure), 2 (usage or parse
// error).

namespace dml::cli {

struct CommandResult {
  int exit_code = 0;
  std::string report;          // human-readable
  std::string machine_report;  // line-oriented key: value document
};

CommandResult run(const std::vector<std::string>& args);

}  // namespace dml::cli
