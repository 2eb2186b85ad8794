#include "vpose/scenario.hpp"
#include "vpose/errors.hpp"
#include "vpose/io.hpp"

#include <json.hpp>

#include <cstdlib>
#include <iostream>

namespace vpose
{

using nlohmann::json;

namespace
{

double param_number(const json& p, const char* key, double fallback)
{
    if (!p.contains(key))
        return fallback;
    if (!p[key].is_number())
        throw SchemaError(std::string("scenario: params.") + key + " must be a number");
    return p[key].get<double>();
}

int param_integer(const json& p, const char* key, int fallback)
{
    if (!p.contains(key))
        return fallback;
    if (!p[key].is_number_integer())
        throw SchemaError(std::string("scenario: params.") + key + " must be an integer");
    return p[key].get<int>();
}

SolverParams parse_params(const json& p)
{
    static const char* known[] = {"dt", "d_epsilon", "accel_tol", "vel_tol", "max_iterations",
                                  "svd_epsilon", "settle_steps", "clearance"};
    if (!p.is_object())
        throw SchemaError("scenario: params must be an object");
    for (const auto& [key, value] : p.items())
    {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw SchemaError("scenario: unknown solver parameter '" + key + "'");
    }
    SolverParams s;
    s.dt = param_number(p, "dt", s.dt);
    s.d_epsilon = param_number(p, "d_epsilon", s.d_epsilon);
    s.accel_tol = param_number(p, "accel_tol", s.accel_tol);
    s.vel_tol = param_number(p, "vel_tol", s.vel_tol);
    s.max_iterations = param_integer(p, "max_iterations", s.max_iterations);
    s.svd_epsilon = param_number(p, "svd_epsilon", s.svd_epsilon);
    s.settle_steps = param_integer(p, "settle_steps", s.settle_steps);
    s.clearance = param_number(p, "clearance", s.clearance);
    return s;
}

std::string file_ref(const json& doc, const char* key)
{
    if (!doc.contains(key) || !doc[key].is_string())
        throw SchemaError(std::string("scenario: field '") + key + "' must be a file name");
    return doc[key].get<std::string>();
}

const char* error_kind(const std::exception& e)
{
    if (dynamic_cast<const SchemaError*>(&e))
        return "schema";
    if (dynamic_cast<const ConvergenceError*>(&e))
        return "convergence";
    if (dynamic_cast<const SolverError*>(&e))
        return "solver";
    if (dynamic_cast<const OutOfBoundsError*>(&e))
        return "out_of_bounds";
    if (dynamic_cast<const DomainError*>(&e))
        return "domain";
    return "runtime";
}

} // namespace

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir, std::string name)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw SchemaError(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaError("scenario: top level must be an object");
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != kSchemaVersion)
        throw SchemaError("scenario: missing or unsupported schema_version");

    Scenario sc;
    sc.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : std::move(name);
    sc.terrain_file = base_dir / file_ref(doc, "terrain");
    sc.vehicle_file = base_dir / file_ref(doc, "vehicle");

    if (!doc.contains("query") || !doc["query"].is_object())
        throw SchemaError("scenario: query must be an object");
    const json& q = doc["query"];
    const bool has_pose = q.contains("pose"), has_path = q.contains("path");
    if (has_pose == has_path)
        throw SchemaError("scenario: query needs exactly one of 'pose' or 'path'");
    if (has_pose)
    {
        const json& p = q["pose"];
        if (!p.is_object() || !p.contains("x") || !p.contains("y") || !p["x"].is_number() || !p["y"].is_number())
            throw SchemaError("scenario: pose query needs numeric x and y");
        PoseQuery pq;
        pq.h.x = p["x"].get<double>();
        pq.h.y = p["y"].get<double>();
        if (p.contains("yaw"))
        {
            if (!p["yaw"].is_number())
                throw SchemaError("scenario: pose yaw must be a number");
            pq.h.yaw = p["yaw"].get<double>();
        }
        sc.query = pq;
    }
    else
    {
        const json& p = q["path"];
        if (!p.is_object() || !p.contains("file") || !p["file"].is_string())
            throw SchemaError("scenario: path query needs a file");
        PathQuery pq;
        pq.file = base_dir / p["file"].get<std::string>();
        if (p.contains("samples"))
        {
            if (!p["samples"].is_number_integer())
                throw SchemaError("scenario: path samples must be an integer");
            pq.samples = p["samples"].get<int>();
        }
        sc.query = pq;
    }

    if (doc.contains("params"))
        sc.params = parse_params(doc["params"]);
    if (doc.contains("mode"))
    {
        if (!doc["mode"].is_string())
            throw SchemaError("scenario: mode must be a string");
        sc.params.mode = parse_mode(doc["mode"].get<std::string>());
    }
    if (doc.contains("z_start"))
    {
        if (!doc["z_start"].is_number())
            throw SchemaError("scenario: z_start must be a number");
        sc.z_start = doc["z_start"].get<double>();
    }
    if (doc.contains("trace"))
    {
        if (!doc["trace"].is_boolean())
            throw SchemaError("scenario: trace must be a boolean");
        sc.trace = doc["trace"].get<bool>();
    }
    sc.params.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& file)
{
    return parse_scenario(read_text_file(file), file.parent_path(), file.stem().string());
}

std::vector<PathSample> execute_scenario(const Scenario& scenario, const TraceSink& trace, unsigned threads)
{
    const TerrainSurface surface(load_terrain(scenario.terrain_file));
    const VehicleModel model = load_vehicle(scenario.vehicle_file);

    if (const auto* pose = std::get_if<PoseQuery>(&scenario.query))
    {
        PathSample s;
        s.h = pose->h;
        s.pose = estimate_pose(pose->h, model, surface, scenario.params, scenario.z_start, trace);
        return {s};
    }
    const auto& pq = std::get<PathQuery>(scenario.query);
    const SurfacePath path = load_path(pq.file);
    PathOptions options;
    options.threads = threads;
    return pose_along_path(path, model, surface, scenario.params, pq.samples, options);
}

std::filesystem::path default_output_dir()
{
    if (const char* env = std::getenv("VPOSE_OUT_DIR"); env && *env)
        return env;
    return "vpose_out";
}

ScenarioOutputs run_scenario(const std::filesystem::path& scenario_file, const RunOptions& options)
{
    ScenarioOutputs out;
    const std::filesystem::path dir = options.out_dir.empty() ? default_output_dir() : options.out_dir;
    const std::string stem = scenario_file.stem().string();

    auto fail = [&](const std::exception& e, int code, std::optional<double> u) {
        json err;
        err["schema_version"] = kSchemaVersion;
        err["scenario"] = scenario_file.string();
        err["error"]["kind"] = error_kind(e);
        err["error"]["message"] = e.what();
        if (u)
            err["error"]["u"] = *u;
        out.error_json = dir / (stem + "_error.json");
        try
        {
            write_text_file(out.error_json, err.dump(2));
        }
        catch (const std::exception&)
        {
            out.error_json.clear();
        }
        std::cerr << err.dump() << '\n';
        out.exit_code = code;
        return out;
    };

    Scenario sc;
    try
    {
        sc = load_scenario(scenario_file);
        if (options.mode)
            sc.params.mode = *options.mode;
        if (options.trace)
            sc.trace = *options.trace;
        if (options.samples)
        {
            auto* pq = std::get_if<PathQuery>(&sc.query);
            if (!pq)
                throw SchemaError("--samples applies to path scenarios only");
            pq->samples = *options.samples;
        }
    }
    catch (const std::exception& e)
    {
        return fail(e, kExitSchema, std::nullopt);
    }

    try
    {
        std::string trace_text;
        TraceSink sink;
        if (sc.trace)
            sink = [&](const TraceRecord& r) { trace_text += trace_record_to_json(r); };

        const std::vector<PathSample> samples = execute_scenario(sc, sink, options.threads);

        out.results_json = dir / (stem + "_results.json");
        out.summary_csv = dir / (stem + "_summary.csv");
        write_text_file(out.results_json, results_to_json(samples, sc.params.mode, sc.name));
        write_text_file(out.summary_csv, results_to_csv(samples));
        if (sc.trace)
        {
            out.trace_ndjson = dir / (stem + "_trace.ndjson");
            write_text_file(out.trace_ndjson, trace_text);
        }
    }
    catch (const SchemaError& e)
    {
        return fail(e, kExitSchema, std::nullopt);
    }
    catch (const PathError& e)
    {
        return fail(e, kExitSolver, e.u());
    }
    catch (const std::exception& e)
    {
        return fail(e, kExitSolver, std::nullopt);
    }
    return out;
}

} // namespace vpose
