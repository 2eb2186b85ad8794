#include "vpose/vehicle.hpp"
#include "vpose/errors.hpp"

#include <cmath>
#include <set>

namespace vpose
{

void VehicleModel::validate() const
{
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw DomainError("vehicle mass must be positive");
    if (!(inertia_roll > 0.0) || !(inertia_pitch > 0.0) || !std::isfinite(inertia_roll) ||
        !std::isfinite(inertia_pitch))
        throw DomainError("vehicle inertias must be positive");
    if (!(wheel_radius >= 0.0))
        throw DomainError("wheel radius must be non-negative");
    if (wheels.cols() < 1)
        throw DomainError("vehicle needs at least one wheel");
    if (!wheels.allFinite())
        throw DomainError("wheel offsets must be finite");
}

Eigen::DiagonalMatrix<double, 3> VehicleModel::mass_matrix() const
{
    return Eigen::DiagonalMatrix<double, 3>(mass, inertia_roll, inertia_pitch);
}

double VehicleModel::length() const
{
    const double lx = wheels.row(0).maxCoeff() - wheels.row(0).minCoeff();
    const double ly = wheels.row(1).maxCoeff() - wheels.row(1).minCoeff();
    const double l = std::max(lx, ly);
    return l > 0.0 ? l : 1.0;
}

Eigen::Vector2d box_inertia(double mass, double length, double width, double height)
{
    return {mass * (width * width + height * height) / 12.0, mass * (length * length + height * height) / 12.0};
}

FullConfiguration FullConfiguration::compose(const Placement& h, const Eigen::Vector3d& q)
{
    return {h.x, h.y, q(0), q(1), q(2), h.yaw};
}

Eigen::Matrix3d body_rotation(double roll, double pitch, double yaw)
{
    return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

Eigen::Matrix3Xd wheel_world_points(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q)
{
    const Eigen::Matrix3d R = body_rotation(q(1), q(2), h.yaw);
    Eigen::Matrix3Xd points = R * model.wheels;
    points.colwise() += Eigen::Vector3d(h.x, h.y, q(0));
    return points;
}

Eigen::Matrix3d wheel_jacobian(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q,
                               Eigen::Index wheel)
{
    const double ca = std::cos(q(1)), sa = std::sin(q(1));
    const double cb = std::cos(q(2)), sb = std::sin(q(2));
    const Eigen::Matrix3d Rz = Eigen::AngleAxisd(h.yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    Eigen::Matrix3d Ry, dRy, Rx, dRx;
    Ry << cb, 0, sb, 0, 1, 0, -sb, 0, cb;
    dRy << -sb, 0, cb, 0, 0, 0, -cb, 0, -sb;
    Rx << 1, 0, 0, 0, ca, -sa, 0, sa, ca;
    dRx << 0, 0, 0, 0, -sa, -ca, 0, ca, -sa;

    const Eigen::Vector3d o = model.wheels.col(wheel);
    Eigen::Matrix3d J;
    J.col(0) = Eigen::Vector3d::UnitZ();
    J.col(1) = Rz * Ry * dRx * o;
    J.col(2) = Rz * dRy * Rx * o;
    return J;
}

Eigen::VectorXd gap_vector(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q,
                           const TerrainSurface& surface, ForceMode mode)
{
    const Eigen::Matrix3Xd points = wheel_world_points(model, h, q);
    Eigen::VectorXd d(points.cols());
    for (Eigen::Index j = 0; j < points.cols(); ++j)
    {
        const double x = points(0, j), y = points(1, j);
        const double vertical = points(2, j) - height_at(surface, x, y);
        d(j) = mode == ForceMode::Vertical ? vertical : vertical * normal_at(surface, x, y).z();
    }
    return d;
}

namespace
{

void check_active(const VehicleModel& model, const std::vector<Eigen::Index>& active)
{
    std::set<Eigen::Index> seen;
    for (Eigen::Index j : active)
    {
        if (j < 0 || j >= model.wheel_count())
            throw DomainError("active wheel index out of range");
        if (!seen.insert(j).second)
            throw DomainError("duplicate active wheel index");
    }
}

} // namespace

WrenchMatrices build_wrench(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q,
                            const std::vector<Eigen::Index>& active)
{
    check_active(model, active);
    WrenchMatrices W;
    W.contact.resize(3, static_cast<Eigen::Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c)
        W.contact.col(static_cast<Eigen::Index>(c)) = wheel_jacobian(model, h, q, active[c]).row(2).transpose();
    W.gravity = Eigen::Vector3d(-model.mass * kGravity, 0.0, 0.0);
    return W;
}

WrenchMatrices build_wrench(const VehicleModel& model, const Placement& h, const Eigen::Vector3d& q,
                            const std::vector<Eigen::Index>& active, const TerrainSurface& surface, ForceMode mode)
{
    if (mode == ForceMode::Vertical)
        return build_wrench(model, h, q, active);

    check_active(model, active);
    const Eigen::Matrix3Xd points = wheel_world_points(model, h, q);
    WrenchMatrices W;
    W.contact.resize(3, static_cast<Eigen::Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c)
    {
        const Eigen::Index j = active[c];
        const Eigen::Vector3d n = normal_at(surface, points(0, j), points(1, j));
        W.contact.col(static_cast<Eigen::Index>(c)) = wheel_jacobian(model, h, q, j).transpose() * n;
    }
    W.gravity = Eigen::Vector3d(-model.mass * kGravity, 0.0, 0.0);
    return W;
}

} // namespace vpose
