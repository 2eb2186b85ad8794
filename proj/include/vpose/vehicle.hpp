#pragma once

#include "vpose/terrain.hpp"

#include <Eigen/Dense>

#include <vector>

namespace vpose
{

/// Gravitational acceleration, m/s^2.
inline constexpr double kGravity = 9.8;

/// Direction along which a wheel's scalar contact force acts.
enum class ForceMode
{
    Vertical, ///< world z; gaps are vertical distances
    Normal    ///< terrain normal under the wheel; gaps projected on that normal
};

/// Rigid wheeled vehicle. Wheel columns are body-frame offsets of the
/// wheel-bottom contact points from the center of mass.
struct VehicleModel
{
    double mass = 1.0;          // kg
    double inertia_roll = 1.0;  // kg m^2
    double inertia_pitch = 1.0; // kg m^2
    double wheel_radius = 0.0;  // m, informational
    Eigen::Matrix3Xd wheels;    // 3 x k, m

    void validate() const;

    Eigen::Index wheel_count() const { return wheels.cols(); }

    /// diag(m, I_roll, I_pitch)
    Eigen::DiagonalMatrix<double, 3> mass_matrix() const;

    /// Extent of the wheel layout along the body x axis (at least the lateral extent).
    double length() const;
};

/// Box inertias (roll, pitch) of a uniform solid with the given dimensions.
Eigen::Vector2d box_inertia(double mass, double length, double width, double height);

/// Fixed part of the configuration: planar position and yaw.
struct Placement
{
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
};

/// r = (x, y, z, roll, pitch, yaw)
struct FullConfiguration
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;

    static FullConfiguration compose(const Placement& h, const Eigen::Vector3d& q);
};

/// Body-to-world rotation Rz(yaw) * Ry(pitch) * Rx(roll).
Eigen::Matrix3d body_rotation(double roll, double pitch, double yaw);

/// World positions (3 x k) of the wheel contact points for reduced pose q = (z, roll, pitch).
Eigen::Matrix3Xd wheel_world_points(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q);

/// d p_j / d(z, roll, pitch) for wheel j (columns ordered z, roll, pitch).
Eigen::Matrix3d wheel_jacobian(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q,
                               Eigen::Index wheel);

/// Per-wheel gap to the terrain; negative values are penetration.
/// Throws OutOfBoundsError when a wheel projects outside the terrain footprint.
Eigen::VectorXd gap_vector(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q,
                           const TerrainSurface& surface, ForceMode mode = ForceMode::Vertical);

/// Wrench quantities in the reduced coordinates (z force, roll torque, pitch torque).
struct WrenchMatrices
{
    Eigen::Matrix<double, 3, Eigen::Dynamic> contact; // W_f, one column per active wheel
    Eigen::Vector3d gravity = Eigen::Vector3d::Zero(); // W_g G
};

/// Vertical-force wrench. Column j is the generalized force produced by a unit
/// upward force at wheel active[j]; at zero roll/pitch this is (1, dy_j, -dx_j).
WrenchMatrices build_wrench(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q,
                            const std::vector<Eigen::Index>& active);

/// Same, with the force direction chosen by mode (terrain normals for ForceMode::Normal).
WrenchMatrices build_wrench(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q,
                            const std::vector<Eigen::Index>& active, const TerrainSurface& surface, ForceMode mode);

} // namespace vpose
