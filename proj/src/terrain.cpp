#include "vpose/terrain.hpp"
#include "vpose/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vpose
{

namespace
{

void check_unit(double t, const char* name)
{
    if (!(t >= 0.0 && t <= 1.0))
    {
        std::ostringstream msg;
        msg << "patch parameter " << name << " = " << t << " outside [0,1]";
        throw DomainError(msg.str());
    }
}

} // namespace

void ControlGrid::validate() const
{
    if (rows < 4 || cols < 4)
        throw DomainError("control grid needs at least 4x4 samples");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw DomainError("control grid spacing must be positive");
    if (heights.rows() != rows || heights.cols() != cols)
        throw DomainError("control grid height matrix does not match rows/cols");
    if (!heights.allFinite())
        throw DomainError("control grid heights must be finite");
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y))
        throw DomainError("control grid origin must be finite");
}

Eigen::Vector3d eval_patch(const BPatch& patch, double v, double w)
{
    check_unit(v, "v");
    check_unit(w, "w");
    const double z = basis_weights(v) * patch.D * basis_weights(w).transpose();
    return {patch.origin_x + w * patch.spacing, patch.origin_y + v * patch.spacing, z};
}

PatchJet patch_jet(const BPatch& patch, double v, double w)
{
    check_unit(v, "v");
    check_unit(w, "w");
    const Eigen::RowVector4d bv = basis_weights(v);
    const Eigen::RowVector4d bv1 = basis_weights(v, 1);
    const Eigen::RowVector4d bv2 = basis_weights(v, 2);
    const Eigen::Vector4d bw = basis_weights(w).transpose();
    const Eigen::Vector4d bw1 = basis_weights(w, 1).transpose();
    const Eigen::Vector4d bw2 = basis_weights(w, 2).transpose();

    PatchJet jet;
    jet.z = bv * patch.D * bw;
    jet.z_v = bv1 * patch.D * bw;
    jet.z_w = bv * patch.D * bw1;
    jet.z_vv = bv2 * patch.D * bw;
    jet.z_vw = bv1 * patch.D * bw1;
    jet.z_ww = bv * patch.D * bw2;
    return jet;
}

TerrainSurface::TerrainSurface(ControlGrid grid) : grid_(std::move(grid))
{
    grid_.validate();
}

TerrainSurface::Footprint TerrainSurface::footprint() const
{
    const double s = grid_.spacing;
    return {grid_.origin_x + s, grid_.origin_x + static_cast<double>(grid_.cols - 2) * s,
            grid_.origin_y + s, grid_.origin_y + static_cast<double>(grid_.rows - 2) * s};
}

bool TerrainSurface::contains(double x, double y) const
{
    const Footprint f = footprint();
    return x >= f.x_min && x <= f.x_max && y >= f.y_min && y <= f.y_max;
}

BPatch TerrainSurface::patch(Eigen::Index r0, Eigen::Index c0) const
{
    if (r0 < 0 || c0 < 0 || r0 + 4 > grid_.rows || c0 + 4 > grid_.cols)
        throw OutOfBoundsError("patch window outside control grid");
    BPatch p;
    p.D = grid_.heights.block<4, 4>(r0, c0);
    p.spacing = grid_.spacing;
    p.origin_x = grid_.origin_x + static_cast<double>(c0 + 1) * grid_.spacing;
    p.origin_y = grid_.origin_y + static_cast<double>(r0 + 1) * grid_.spacing;
    return p;
}

TerrainSurface::Location TerrainSurface::locate(double x, double y) const
{
    if (!contains(x, y))
    {
        std::ostringstream msg;
        msg << "point (" << x << ", " << y << ") outside terrain footprint";
        throw OutOfBoundsError(msg.str());
    }
    // Knot-space coordinates measured from the first evaluable knot.
    const double kx = (x - grid_.origin_x) / grid_.spacing - 1.0;
    const double ky = (y - grid_.origin_y) / grid_.spacing - 1.0;
    const Eigen::Index max_c0 = grid_.cols - 4;
    const Eigen::Index max_r0 = grid_.rows - 4;

    Location loc;
    loc.c0 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(kx)), 0, max_c0);
    loc.r0 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(ky)), 0, max_r0);
    loc.w = std::clamp(kx - static_cast<double>(loc.c0), 0.0, 1.0);
    loc.v = std::clamp(ky - static_cast<double>(loc.r0), 0.0, 1.0);
    return loc;
}

Eigen::Vector2d TerrainSurface::xy_from_parameters(double v, double w) const
{
    const Footprint f = footprint();
    return {std::clamp(f.x_min + w * (f.x_max - f.x_min), f.x_min, f.x_max),
            std::clamp(f.y_min + v * (f.y_max - f.y_min), f.y_min, f.y_max)};
}

double TerrainSurface::max_sample_in(double x0, double x1, double y0, double y1) const
{
    const double s = grid_.spacing;
    auto col = [&](double x) { return (x - grid_.origin_x) / s; };
    auto row = [&](double y) { return (y - grid_.origin_y) / s; };
    // A point is influenced by control samples up to two spacings away.
    const auto c_lo = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(col(x0))) - 2, 0, grid_.cols - 1);
    const auto c_hi = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(col(x1))) + 2, 0, grid_.cols - 1);
    const auto r_lo = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(row(y0))) - 2, 0, grid_.rows - 1);
    const auto r_hi = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(row(y1))) + 2, 0, grid_.rows - 1);
    return grid_.heights.block(r_lo, c_lo, r_hi - r_lo + 1, c_hi - c_lo + 1).maxCoeff();
}

double height_at(const TerrainSurface& surface, double x, double y)
{
    const auto loc = surface.locate(x, y);
    return eval_patch(surface.patch(loc.r0, loc.c0), loc.v, loc.w).z();
}

Eigen::Vector2d gradient_at(const TerrainSurface& surface, double x, double y)
{
    const auto loc = surface.locate(x, y);
    const PatchJet jet = patch_jet(surface.patch(loc.r0, loc.c0), loc.v, loc.w);
    const double s = surface.grid().spacing;
    return {jet.z_w / s, jet.z_v / s};
}

Eigen::Vector3d normal_at(const TerrainSurface& surface, double x, double y)
{
    const Eigen::Vector2d g = gradient_at(surface, x, y);
    return Eigen::Vector3d(-g.x(), -g.y(), 1.0).normalized();
}

void SurfacePath::validate() const
{
    if (control.rows() < 4)
        throw DomainError("surface path needs at least 4 control points");
    if (!control.allFinite())
        throw DomainError("surface path control points must be finite");
}

namespace
{

// Segment index and local parameter for global u in [0,1].
std::pair<Eigen::Index, double> path_segment(const SurfacePath& path, double u)
{
    if (!(u >= 0.0 && u <= 1.0))
        throw DomainError("path parameter u outside [0,1]");
    path.validate();
    const Eigen::Index segments = path.control.rows() - 3;
    const double scaled = u * static_cast<double>(segments);
    const Eigen::Index s = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(scaled)), segments - 1);
    return {s, scaled - static_cast<double>(s)};
}

} // namespace

Eigen::Vector2d path_parameters(const SurfacePath& path, double u)
{
    const auto [s, t] = path_segment(path, u);
    return (basis_weights(t) * path.control.middleRows<4>(s)).transpose();
}

Eigen::Vector2d path_tangent(const SurfacePath& path, double u)
{
    const auto [s, t] = path_segment(path, u);
    const double segments = static_cast<double>(path.control.rows() - 3);
    return segments * (basis_weights(t, 1) * path.control.middleRows<4>(s)).transpose();
}

Eigen::Vector3d eval_path(const SurfacePath& path, const TerrainSurface& surface, double u)
{
    const Eigen::Vector2d vw = path_parameters(path, u);
    constexpr double slack = 1e-12;
    if (vw.minCoeff() < -slack || vw.maxCoeff() > 1.0 + slack)
    {
        std::ostringstream msg;
        msg << "path leaves the surface parameter domain at u = " << u << ": (v,w) = ("
            << vw.x() << ", " << vw.y() << ")";
        throw DomainError(msg.str());
    }
    const Eigen::Vector2d xy =
        surface.xy_from_parameters(std::clamp(vw.x(), 0.0, 1.0), std::clamp(vw.y(), 0.0, 1.0));
    const auto loc = surface.locate(xy.x(), xy.y());
    const Eigen::Vector3d p = eval_patch(surface.patch(loc.r0, loc.c0), loc.v, loc.w);
    return {xy.x(), xy.y(), p.z()};
}

} // namespace vpose
