#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace anholonome::gen {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
};

/// Runs `command` through the shell and captures its standard output.
inline ProcessResult run_command(const std::string& command) {
  ProcessResult r;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed: " + command);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

#ifdef ANHOLONOME_CLI_PATH
inline std::string cli(const std::string& args) { return std::string("'") + ANHOLONOME_CLI_PATH + "' " + args; }
#endif

}  // namespace anholonome::gen
