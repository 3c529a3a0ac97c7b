#pragma once

#include <filesystem>
#include <string>

#include "creve/config.hpp"
#include "creve/metrics.hpp"
#include "creve/runner.hpp"

namespace creve {

// Process exit codes used by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

// Generate a dataset from config.scenario and write it, plus the run
// manifest, into out_dir.
void cmd_simulate(const AppConfig& config,
                  const std::filesystem::path& out_dir);

// Run the chosen estimator over the dataset; writes estimates.csv and the
// manifest (with per-scan timing stats) into out_dir.
void cmd_estimate(const std::filesystem::path& dataset_dir,
                  const AppConfig& config, Method method,
                  const std::filesystem::path& out_dir);

// Evaluate an estimates file against a dataset's ground truth; writes
// report.json, aligned_trajectory.csv (when ground-truth poses exist) and
// the manifest into out_dir.
void cmd_evaluate(const std::filesystem::path& estimates_path,
                  const std::filesystem::path& dataset_dir,
                  Alignment alignment, const AppConfig& config,
                  const std::filesystem::path& out_dir);

// Map an in-flight exception to the process exit code.
int exit_code_for_current_exception();

}  // namespace creve
