#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fracops/experiments/config.hpp"
#include "fracops/experiments/report.hpp"

namespace fracops::experiments {

struct ExperimentInfo {
    std::string name;
    std::string description;
};

const std::vector<ExperimentInfo>& list_experiments();

/// Artifact version recorded in every report.
std::string version();

/// $FRACOPS_OUTPUT_ROOT when set, otherwise "results".
std::filesystem::path default_output_root();

struct RunOptions {
    std::filesystem::path output_root = default_output_root();
};

/// Computation of a validated config. Call it to run the experiment.
using PreparedRun = std::function<void(RunContext&)>;

/// Checks every key and parameter; throws ConfigParse naming the offending
/// key. No computation happens here.
PreparedRun validate(const ExperimentConfig& config);

/// Output directory of a config: <root>/<output key or config stem>.
/// Absolute paths and ".." components are rejected.
std::filesystem::path output_dir_for(const ExperimentConfig& config, const RunOptions& options);

/// Validates, runs and writes the CSV tables plus report.json. Module
/// errors raised during the computation are recorded as a failed
/// assertion; config errors propagate.
ExperimentReport run(const ExperimentConfig& config, const RunOptions& options = {});

enum class RunStatus { Passed = 0, Failed = 1, ConfigError = 2 };

struct SuiteEntry {
    std::filesystem::path config;
    std::string experiment;
    RunStatus status;
    std::string message;
    double seconds;
};

struct SuiteSummary {
    std::filesystem::path directory;
    std::vector<SuiteEntry> entries;
    std::vector<std::string> warnings;

    /// 0 if every config passed (also for an empty suite), else the worst status.
    int exit_code() const noexcept;
    nlohmann::ordered_json to_json() const;
};

/// Runs every *.cfg in the directory (sorted by name), `jobs` at a time.
/// A missing directory raises Io.
SuiteSummary run_all(const std::filesystem::path& directory, const RunOptions& options = {}, unsigned jobs = 1);

}  // namespace fracops::experiments
