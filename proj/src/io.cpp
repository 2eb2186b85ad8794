#include "vpose/io.hpp"
#include "vpose/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace vpose
{

using nlohmann::json;

namespace
{

json parse_document(std::string_view text, const char* what)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw SchemaError(std::string(what) + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object())
        throw SchemaError(std::string(what) + ": top level must be an object");
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
        throw SchemaError(std::string(what) + ": missing integer schema_version");
    if (doc["schema_version"].get<int>() != kSchemaVersion)
        throw SchemaError(std::string(what) + ": unsupported schema_version " + doc["schema_version"].dump());
    return doc;
}

double number(const json& doc, const char* key, const char* what)
{
    if (!doc.contains(key) || !doc[key].is_number())
        throw SchemaError(std::string(what) + ": field '" + key + "' must be a number");
    return doc[key].get<double>();
}

long long integer(const json& doc, const char* key, const char* what)
{
    if (!doc.contains(key) || !doc[key].is_number_integer())
        throw SchemaError(std::string(what) + ": field '" + key + "' must be an integer");
    return doc[key].get<long long>();
}

const json& array(const json& doc, const char* key, const char* what)
{
    if (!doc.contains(key) || !doc[key].is_array())
        throw SchemaError(std::string(what) + ": field '" + key + "' must be an array");
    return doc[key];
}

std::vector<double> numbers(const json& arr, const char* what)
{
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& x : arr)
    {
        if (!x.is_number())
            throw SchemaError(std::string(what) + ": expected numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

json vector_json(const Eigen::VectorXd& x)
{
    return json(std::vector<double>(x.data(), x.data() + x.size()));
}

Eigen::VectorXd vector_from(const json& arr, const char* what)
{
    if (!arr.is_array())
        throw SchemaError(std::string(what) + ": expected an array");
    const std::vector<double> v = numbers(arr, what);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

std::string read_text_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw SchemaError("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& file, std::string_view text)
{
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    out << text;
}

ControlGrid parse_terrain(std::string_view json_text)
{
    constexpr const char* what = "terrain";
    const json doc = parse_document(json_text, what);
    ControlGrid grid;
    grid.rows = integer(doc, "rows", what);
    grid.cols = integer(doc, "cols", what);
    grid.origin_x = number(doc, "origin_x", what);
    grid.origin_y = number(doc, "origin_y", what);
    grid.spacing = number(doc, "spacing", what);
    const std::vector<double> heights = numbers(array(doc, "heights", what), what);
    if (grid.rows < 0 || grid.cols < 0 || static_cast<long long>(heights.size()) != grid.rows * grid.cols)
        throw SchemaError("terrain: heights must hold rows*cols values");
    grid.heights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        heights.data(), grid.rows, grid.cols);
    grid.validate();
    return grid;
}

ControlGrid load_terrain(const std::filesystem::path& file)
{
    return parse_terrain(read_text_file(file));
}

std::string terrain_to_json(const ControlGrid& grid)
{
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["rows"] = grid.rows;
    doc["cols"] = grid.cols;
    doc["origin_x"] = grid.origin_x;
    doc["origin_y"] = grid.origin_y;
    doc["spacing"] = grid.spacing;
    std::vector<double> heights;
    heights.reserve(static_cast<std::size_t>(grid.rows * grid.cols));
    for (Eigen::Index r = 0; r < grid.rows; ++r)
        for (Eigen::Index c = 0; c < grid.cols; ++c)
            heights.push_back(grid.heights(r, c));
    doc["heights"] = heights;
    return doc.dump();
}

VehicleModel parse_vehicle(std::string_view json_text)
{
    constexpr const char* what = "vehicle";
    const json doc = parse_document(json_text, what);
    VehicleModel model;
    model.mass = number(doc, "mass", what);
    model.wheel_radius = doc.contains("wheel_radius") ? number(doc, "wheel_radius", what) : 0.0;

    if (doc.contains("inertia_roll") || doc.contains("inertia_pitch"))
    {
        model.inertia_roll = number(doc, "inertia_roll", what);
        model.inertia_pitch = number(doc, "inertia_pitch", what);
    }
    else if (doc.contains("dimensions"))
    {
        const std::vector<double> dims = numbers(array(doc, "dimensions", what), what);
        if (dims.size() != 3)
            throw SchemaError("vehicle: dimensions must be [length, width, height]");
        const Eigen::Vector2d I = box_inertia(model.mass, dims[0], dims[1], dims[2]);
        model.inertia_roll = I(0);
        model.inertia_pitch = I(1);
    }
    else
        throw SchemaError("vehicle: give inertia_roll/inertia_pitch or dimensions");

    const json& wheels = array(doc, "wheels", what);
    model.wheels.resize(3, static_cast<Eigen::Index>(wheels.size()));
    for (std::size_t j = 0; j < wheels.size(); ++j)
    {
        if (!wheels[j].is_array() || wheels[j].size() != 3)
            throw SchemaError("vehicle: each wheel must be [x, y, z]");
        const std::vector<double> o = numbers(wheels[j], what);
        model.wheels.col(static_cast<Eigen::Index>(j)) << o[0], o[1], o[2];
    }
    model.validate();
    return model;
}

VehicleModel load_vehicle(const std::filesystem::path& file)
{
    return parse_vehicle(read_text_file(file));
}

std::string vehicle_to_json(const VehicleModel& model)
{
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["mass"] = model.mass;
    doc["inertia_roll"] = model.inertia_roll;
    doc["inertia_pitch"] = model.inertia_pitch;
    doc["wheel_radius"] = model.wheel_radius;
    json wheels = json::array();
    for (Eigen::Index j = 0; j < model.wheels.cols(); ++j)
        wheels.push_back({model.wheels(0, j), model.wheels(1, j), model.wheels(2, j)});
    doc["wheels"] = wheels;
    return doc.dump(2);
}

SurfacePath parse_path(std::string_view json_text)
{
    constexpr const char* what = "path";
    const json doc = parse_document(json_text, what);
    const json& pts = array(doc, "control_points", what);
    SurfacePath path;
    path.control.resize(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        if (!pts[i].is_array() || pts[i].size() != 2)
            throw SchemaError("path: each control point must be [v, w]");
        const std::vector<double> vw = numbers(pts[i], what);
        path.control.row(static_cast<Eigen::Index>(i)) << vw[0], vw[1];
    }
    path.validate();
    return path;
}

SurfacePath load_path(const std::filesystem::path& file)
{
    return parse_path(read_text_file(file));
}

ForceMode parse_mode(std::string_view name)
{
    if (name == "vertical")
        return ForceMode::Vertical;
    if (name == "normal")
        return ForceMode::Normal;
    throw SchemaError("unknown force mode '" + std::string(name) + "' (expected vertical or normal)");
}

const char* to_string(ForceMode mode)
{
    return mode == ForceMode::Vertical ? "vertical" : "normal";
}

std::string results_to_json(const std::vector<PathSample>& samples, ForceMode mode, std::string_view scenario)
{
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["scenario"] = std::string(scenario);
    doc["mode"] = to_string(mode);
    json poses = json::array();
    for (const PathSample& s : samples)
    {
        json p;
        p["u"] = s.u;
        p["x"] = s.h.x;
        p["y"] = s.h.y;
        p["yaw"] = s.h.yaw;
        p["z"] = s.pose.q(0);
        p["roll"] = s.pose.q(1);
        p["pitch"] = s.pose.q(2);
        p["contacts"] = s.pose.contacts;
        p["forces"] = vector_json(s.pose.forces);
        p["gaps"] = vector_json(s.pose.gaps);
        p["iterations"] = s.pose.iterations;
        p["elapsed"] = s.pose.elapsed;
        poses.push_back(std::move(p));
    }
    doc["poses"] = std::move(poses);
    return doc.dump(2);
}

std::vector<PathSample> parse_results(std::string_view json_text)
{
    constexpr const char* what = "results";
    const json doc = parse_document(json_text, what);
    std::vector<PathSample> out;
    for (const json& p : array(doc, "poses", what))
    {
        PathSample s;
        s.u = number(p, "u", what);
        s.h = {number(p, "x", what), number(p, "y", what), number(p, "yaw", what)};
        s.pose.q = Eigen::Vector3d(number(p, "z", what), number(p, "roll", what), number(p, "pitch", what));
        for (const json& c : array(p, "contacts", what))
        {
            if (!c.is_boolean())
                throw SchemaError("results: contacts must be booleans");
            s.pose.contacts.push_back(c.get<bool>());
        }
        s.pose.forces = vector_from(array(p, "forces", what), what);
        s.pose.gaps = vector_from(array(p, "gaps", what), what);
        s.pose.iterations = static_cast<int>(integer(p, "iterations", what));
        s.pose.elapsed = number(p, "elapsed", what);
        out.push_back(std::move(s));
    }
    return out;
}

std::string results_to_csv(const std::vector<PathSample>& samples)
{
    std::ostringstream out;
    out << std::setprecision(10);
    const Eigen::Index k = samples.empty() ? 0 : samples.front().pose.forces.size();
    out << "u,x,y,yaw_deg,z,roll_deg,pitch_deg,contacts";
    for (Eigen::Index j = 0; j < k; ++j)
        out << ",f" << (j + 1);
    out << '\n';
    constexpr double deg = 180.0 / std::numbers::pi;
    for (const PathSample& s : samples)
    {
        out << s.u << ',' << s.h.x << ',' << s.h.y << ',' << s.h.yaw * deg << ',' << s.pose.q(0) << ','
            << s.pose.q(1) * deg << ',' << s.pose.q(2) * deg << ',';
        for (bool c : s.pose.contacts)
            out << (c ? '1' : '0');
        for (Eigen::Index j = 0; j < s.pose.forces.size(); ++j)
            out << ',' << s.pose.forces(j);
        out << '\n';
    }
    return out.str();
}

std::string trace_record_to_json(const TraceRecord& record)
{
    json doc;
    doc["iteration"] = record.iteration;
    doc["q"] = {record.q(0), record.q(1), record.q(2)};
    doc["v"] = {record.v(0), record.v(1), record.v(2)};
    doc["d"] = vector_json(record.d);
    doc["f"] = vector_json(record.forces);
    doc["terminal"] = record.terminal;
    return doc.dump() + '\n';
}

} // namespace vpose
