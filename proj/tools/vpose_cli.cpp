#include "vpose/bench.hpp"
#include "vpose/errors.hpp"
#include "vpose/io.hpp"
#include "vpose/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace vpose;

namespace
{

int report(const ScenarioOutputs& out)
{
    if (out.exit_code != kExitOk)
    {
        if (!out.error_json.empty())
            std::cerr << "error record: " << out.error_json.string() << '\n';
        return out.exit_code;
    }
    std::cout << out.results_json.string() << '\n' << out.summary_csv.string() << '\n';
    if (!out.trace_ndjson.empty())
        std::cout << out.trace_ndjson.string() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Static pose estimation of wheeled vehicles on B-spline terrain"};
    app.require_subcommand(1);

    std::string scenario_file, out_dir, mode_name, csv_file;
    bool trace = false;
    int samples = 0;
    unsigned threads = 1;
    std::vector<int> wheels{4, 6, 8, 12, 16, 20, 24};
    int reps = 100;

    auto* pose = app.add_subcommand("pose", "Drop the vehicle at one placement");
    pose->add_option("scenario", scenario_file, "Scenario JSON")->required()->check(CLI::ExistingFile);
    pose->add_flag("--trace", trace, "Write per-iteration drop states as NDJSON");
    pose->add_option("--out", out_dir, "Output directory (default $VPOSE_OUT_DIR or ./vpose_out)");
    pose->add_option("--mode", mode_name, "Force direction")->check(CLI::IsMember({"vertical", "normal"}));

    auto* path = app.add_subcommand("path", "Sweep poses along a surface path");
    path->add_option("scenario", scenario_file, "Scenario JSON")->required()->check(CLI::ExistingFile);
    path->add_option("--samples", samples, "Number of samples along the path")->check(CLI::Range(2, 1000000));
    path->add_option("--out", out_dir, "Output directory (default $VPOSE_OUT_DIR or ./vpose_out)");
    path->add_option("--mode", mode_name, "Force direction")->check(CLI::IsMember({"vertical", "normal"}));
    path->add_option("--threads", threads, "Worker threads (1 keeps warm starts)")->check(CLI::Range(1u, 256u));

    auto* bench = app.add_subcommand("bench", "Time SVD and LCP contact-force solves");
    bench->add_option("--wheels", wheels, "Wheel counts in [4, 24]")->delimiter(',')->check(CLI::Range(4, 24));
    bench->add_option("--reps", reps, "Repetitions per wheel count")->check(CLI::PositiveNumber);
    bench->add_option("--out", csv_file, "Plot-data CSV (metadata goes next to it as .json)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (*bench)
        {
            BenchOptions options;
            options.wheel_counts = wheels;
            options.repetitions = reps;
            const std::vector<BenchRecord> records = run_benchmark(options);
            const std::string csv = bench_to_csv(records);
            if (csv_file.empty())
            {
                std::cout << csv;
                return kExitOk;
            }
            std::filesystem::path meta = csv_file;
            meta.replace_extension(".json");
            write_text_file(csv_file, csv);
            write_text_file(meta, bench_to_json(records, options));
            std::cout << csv_file << '\n' << meta.string() << '\n';
            return kExitOk;
        }

        RunOptions options;
        options.out_dir = out_dir;
        if (!mode_name.empty())
            options.mode = parse_mode(mode_name);
        if (*pose)
        {
            if (trace)
                options.trace = true;
        }
        else
        {
            if (samples > 0)
                options.samples = samples;
            options.threads = threads;
        }
        return report(run_scenario(scenario_file, options));
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
}
