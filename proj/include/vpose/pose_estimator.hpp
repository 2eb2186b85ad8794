#pragma once

#include "vpose/contact_svd.hpp"
#include "vpose/terrain.hpp"
#include "vpose/vehicle.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace vpose
{

struct SolverParams
{
    double dt = 1e-3;            // s
    double d_epsilon = 0.01;     // m, contact threshold
    double accel_tol = 1e-6;     // on |(z'', L roll'', L pitch'')|
    double vel_tol = 1e-6;       // on |(z', L roll', L pitch')|
    int max_iterations = 100000;
    double svd_epsilon = 1e-10;
    int settle_steps = 3;        // consecutive quiet iterations that count as equilibrium
    double clearance = 0.5;      // m, default drop height above the highest sample
    ForceMode mode = ForceMode::Vertical;

    void validate() const;
};

/// Reduced drop state: q = (z, roll, pitch), v = q', d = per-wheel gaps at q.
struct DropState
{
    Eigen::Vector3d q = Eigen::Vector3d::Zero();
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    Eigen::Vector3d accel = Eigen::Vector3d::Zero();
    Eigen::VectorXd d;      // gaps at q
    Eigen::VectorXd forces; // per-wheel forces of the last step, N
    int iteration = 0;
};

struct PoseResult
{
    Eigen::Vector3d q = Eigen::Vector3d::Zero(); // equilibrium (z, roll, pitch)
    std::vector<bool> contacts;                  // d_j < d_epsilon at equilibrium
    Eigen::VectorXd forces;                      // N, zero for wheels out of contact
    Eigen::VectorXd gaps;                        // m, at equilibrium
    int iterations = 0;
    double elapsed = 0.0; // s, first contact to equilibrium
};

/// One iteration as seen by a trace consumer: gaps at the start of the
/// iteration, the forces it applied and the state it produced.
struct TraceRecord
{
    int iteration = 0;
    Eigen::VectorXd d;
    Eigen::VectorXd forces;
    Eigen::Vector3d q = Eigen::Vector3d::Zero();
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    bool terminal = false;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Thrown when the drop does not settle within max_iterations.
class ConvergenceError : public std::runtime_error
{
public:
    ConvergenceError(const std::string& what, DropState last) : std::runtime_error(what), last_(std::move(last)) {}

    const DropState& last_state() const { return last_; }

private:
    DropState last_;
};

/// Weighted norm |(x0, L x1, L x2)| used for the equilibrium test.
double reduced_norm(const Eigen::Vector3d& x, double length);

/// Highest control sample under the wheels' footprint, lifted so the lowest
/// wheel clears it by `clearance`, assuming a level vehicle.
double default_z_start(const VehicleModel& model, const TerrainSurface& surface, const Placement& h, double clearance);

DropState initial_state(const VehicleModel& model, const TerrainSurface& surface, const Placement& h,
                        const SolverParams& params, double z_start);

/// Gaps smaller than this (m) are roundoff and enter the contact problem as zero.
inline constexpr double kGapResolution = 1e-9;

/// Contact problem of one drop step over the wheels with d < d_epsilon whose
/// gap closes under contact-free motion; `active` holds their wheel indices.
ContactProblem step_problem(const DropState& state, const VehicleModel& model, const TerrainSurface& surface,
                            const Placement& h, const SolverParams& params);

/// Semi-implicit Euler drop step: contact forces from the SVD solve, v += dt q'',
/// q += dt v, gaps recomputed (with penetration repair).
DropState step(const DropState& state, const VehicleModel& model, const TerrainSurface& surface, const Placement& h,
               const SolverParams& params);

/// Drops the vehicle at h until static equilibrium.
PoseResult estimate_pose(const Placement& h, const VehicleModel& model, const TerrainSurface& surface,
                         const SolverParams& params, std::optional<double> z_start = std::nullopt,
                         const TraceSink& trace = {});

struct PathSample
{
    double u = 0.0;
    Placement h;
    PoseResult pose;
};

struct PathOptions
{
    double warm_clearance = 0.1; // m above the previous equilibrium z
    unsigned threads = 1;        // > 1 fans samples out; disables warm starts
};

/// Error from a path sweep, tagged with the path parameter that failed.
class PathError : public std::runtime_error
{
public:
    PathError(const std::string& what, double u) : std::runtime_error(what), u_(u) {}
    double u() const { return u_; }

private:
    double u_;
};

/// Placement at path parameter u: (x, y) from eval_path, yaw from the xy tangent.
Placement placement_on_path(const SurfacePath& path, const TerrainSurface& surface, double u);

std::vector<PathSample> pose_along_path(const SurfacePath& path, const VehicleModel& model,
                                        const TerrainSurface& surface, const SolverParams& params, int samples,
                                        const PathOptions& options = {});

} // namespace vpose
