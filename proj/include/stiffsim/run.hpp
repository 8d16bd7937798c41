#pragma once

// Dispatch of the command-line experiments.

#include <filesystem>
#include <iosfwd>

#include "stiffsim/config.hpp"

namespace stiffsim {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;     // bad configuration or I/O failure
constexpr int kExitDiverged = 2;  // diverged run or ground truth, or a
                                  // non-monotone stability search

constexpr const char* kOutputDirEnv = "STIFFSIM_OUTPUT_DIR";

// The output file of the run: relative names are placed under
// $STIFFSIM_OUTPUT_DIR when it is set.
std::filesystem::path output_path(const RunConfig& config);

// Runs a validated configuration, writes its CSV once at the end and
// reports progress on `log`. Returns the exit code.
int run(const RunConfig& config, std::ostream& log);

}  // namespace stiffsim
