#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "radar_odom/registration.hpp"
#include "radar_odom/run_config.hpp"

namespace radar_odom {

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitConfigError = 2 };

int cmd_odometry(const std::string& archive_path, const RunConfig& config, std::ostream& out, std::ostream& err);

/// world_path may name a file or `builtin:corridor` / `builtin:sparse`.
int cmd_simulate(const std::string& world_path, const RunConfig& config, std::ostream& out, std::ostream& err);

int cmd_evaluate(const std::string& estimate_path, const std::string& truth_path, const RunConfig& config,
                 std::ostream& out, std::ostream& err);

int cmd_sweep(const std::string& archive_path, const std::string& truth_path, const std::vector<double>& resolutions,
              const std::vector<Metric>& metrics, const RunConfig& config, std::ostream& out, std::ostream& err);

/// Threads allowed by RADAR_ODOM_THREADS, else the hardware concurrency.
std::size_t thread_budget();

/// Full command line front end: `radar_odom <odometry|simulate|evaluate|sweep> ...`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radar_odom
