#pragma once

#include "vpose/pose_estimator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vpose
{

struct PoseQuery
{
    Placement h;
};

struct PathQuery
{
    std::filesystem::path file;
    int samples = 2;
};

/// A scenario file: terrain + vehicle + one query + solver overrides.
/// Relative file references resolve against the scenario's directory.
struct Scenario
{
    std::string name;
    std::filesystem::path terrain_file;
    std::filesystem::path vehicle_file;
    std::variant<PoseQuery, PathQuery> query;
    SolverParams params;
    std::optional<double> z_start;
    bool trace = false;
};

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir, std::string name = {});
Scenario load_scenario(const std::filesystem::path& file);

struct RunOptions
{
    std::filesystem::path out_dir;            // empty: $VPOSE_OUT_DIR, else ./vpose_out
    std::optional<bool> trace;                // overrides the scenario's flag
    std::optional<ForceMode> mode;            // overrides params.mode
    std::optional<int> samples;               // overrides a path query's sample count
    unsigned threads = 1;
};

/// Executes the query; trace records (single-pose queries only) go to `trace`.
std::vector<PathSample> execute_scenario(const Scenario& scenario, const TraceSink& trace = {}, unsigned threads = 1);

/// Files written by run_scenario.
struct ScenarioOutputs
{
    std::filesystem::path results_json;
    std::filesystem::path summary_csv;
    std::filesystem::path trace_ndjson; // empty unless tracing
    std::filesystem::path error_json;   // empty on success
    int exit_code = 0;
};

/// Exit codes of run_scenario and the CLI.
enum ExitCode : int
{
    kExitOk = 0,
    kExitUsage = 1,
    kExitSchema = 2,
    kExitSolver = 3
};

/// Loads and runs a scenario file, writing <name>_results.json and
/// <name>_summary.csv (plus <name>_trace.ndjson) into the output directory.
/// Failures write <name>_error.json with a structured record and return a
/// non-zero exit code instead of throwing.
ScenarioOutputs run_scenario(const std::filesystem::path& scenario_file, const RunOptions& options = {});

std::filesystem::path default_output_dir();

} // namespace vpose
