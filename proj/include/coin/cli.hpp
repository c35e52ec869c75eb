#pragma once

// Command-line driver. Subcommands: nowcast, evaluate, bootstrap, simulate, target.
//
//   coin_cli <command> --config run.cfg [--set key=value]... [--key=value]...
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical failure.

#include "coin/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace coin {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

int run_cli(int argc, char** argv);

// Runs one subcommand on an already assembled configuration; log lines go to `log`.
void run_command(const std::string& command, const Config& config, std::ostream& log);

}  // namespace coin
