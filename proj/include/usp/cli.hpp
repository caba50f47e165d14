#pragma once

#include <string>
#include <vector>

#include "usp/config.hpp"
#include "usp/environment.hpp"

namespace usp {

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 on success, nonzero with a diagnostic on stderr otherwise.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

// Task-set builders shared by the commands and the acceptance suite.
std::vector<PreparationTask> build_train_tasks(const RunConfig& cfg);
std::vector<PreparationTask> build_test_tasks(const RunConfig& cfg, bool apply_subsample);

}  // namespace usp
