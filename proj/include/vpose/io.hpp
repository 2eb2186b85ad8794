#pragma once

#include "vpose/pose_estimator.hpp"
#include "vpose/terrain.hpp"
#include "vpose/vehicle.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vpose
{

/// Version written to, and required in, every file this library reads or writes.
inline constexpr int kSchemaVersion = 1;

// All loaders throw SchemaError on malformed content and DomainError when the
// parsed values violate a model invariant.

ControlGrid parse_terrain(std::string_view json_text);
ControlGrid load_terrain(const std::filesystem::path& file);
std::string terrain_to_json(const ControlGrid& grid);

VehicleModel parse_vehicle(std::string_view json_text);
VehicleModel load_vehicle(const std::filesystem::path& file);
std::string vehicle_to_json(const VehicleModel& model);

SurfacePath parse_path(std::string_view json_text);
SurfacePath load_path(const std::filesystem::path& file);

ForceMode parse_mode(std::string_view name);
const char* to_string(ForceMode mode);

/// Results document for one or more poses (a single pose uses u = 0).
std::string results_to_json(const std::vector<PathSample>& samples, ForceMode mode, std::string_view scenario);
std::vector<PathSample> parse_results(std::string_view json_text);

/// CSV summary: u, x, y, yaw, z, roll_deg, pitch_deg, contacts bitmap, f1..fk.
std::string results_to_csv(const std::vector<PathSample>& samples);

/// One newline-terminated JSON object.
std::string trace_record_to_json(const TraceRecord& record);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, std::string_view text);

} // namespace vpose
