#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace vpose
{

/// Uniform cubic B-spline basis matrix R, acting on the power row [t^3, t^2, t, 1].
template <typename Scalar = double>
Eigen::Matrix<Scalar, 4, 4> bspline_basis()
{
    Eigen::Matrix<Scalar, 4, 4> R;
    R << -1, 3, -3, 1,
          3, -6, 3, 0,
         -3, 0, 3, 0,
          1, 4, 1, 0;
    return R / Scalar(6);
}

/// Power row [t^3, t^2, t, 1] and its first two derivatives with respect to t.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, 4> power_row(Scalar t, int derivative = 0)
{
    Eigen::Matrix<Scalar, 1, 4> row;
    switch (derivative)
    {
    case 0: row << t * t * t, t * t, t, Scalar(1); break;
    case 1: row << Scalar(3) * t * t, Scalar(2) * t, Scalar(1), Scalar(0); break;
    case 2: row << Scalar(6) * t, Scalar(2), Scalar(0), Scalar(0); break;
    default: row.setZero(); break;
    }
    return row;
}

/// The four blending weights V*R of a uniform cubic B-spline segment at t.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, 4> basis_weights(Scalar t, int derivative = 0)
{
    return power_row(t, derivative) * bspline_basis<Scalar>();
}

/// Gridded control heights. Row r lies at y = origin_y + r*spacing, column c at
/// x = origin_x + c*spacing.
struct ControlGrid
{
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double spacing = 1.0;
    Eigen::MatrixXd heights; // rows x cols, meters

    /// Throws DomainError if the grid cannot support a single 4x4 window.
    void validate() const;
};

/// One 4x4 window of control heights. v runs along grid rows (y), w along
/// columns (x); (v,w) = (0,0) sits at (origin_x, origin_y).
struct BPatch
{
    Eigen::Matrix4d D = Eigen::Matrix4d::Zero();
    double origin_x = 0.0;
    double origin_y = 0.0;
    double spacing = 1.0;
};

/// Height and parametric derivatives of a patch at one (v,w).
struct PatchJet
{
    double z = 0.0;
    double z_v = 0.0;
    double z_w = 0.0;
    double z_vv = 0.0;
    double z_vw = 0.0;
    double z_ww = 0.0;
};

/// Surface point p(v,w); z = V R D R^T W^T, x/y from the window's affine map.
Eigen::Vector3d eval_patch(const BPatch& patch, double v, double w);

PatchJet patch_jet(const BPatch& patch, double v, double w);

/// Bicubic B-spline surface made of sliding 4x4 windows over a ControlGrid.
/// Immutable after construction; all queries are const and thread-safe.
class TerrainSurface
{
public:
    struct Footprint
    {
        double x_min, x_max, y_min, y_max;
    };

    /// Window indices and local patch coordinates of a query point.
    struct Location
    {
        Eigen::Index r0 = 0;
        Eigen::Index c0 = 0;
        double v = 0.0;
        double w = 0.0;
    };

    explicit TerrainSurface(ControlGrid grid);

    const ControlGrid& grid() const { return grid_; }

    /// Region covered by complete 4x4 windows.
    Footprint footprint() const;

    bool contains(double x, double y) const;

    /// Window whose top-left control point is (r0, c0).
    BPatch patch(Eigen::Index r0, Eigen::Index c0) const;

    /// Throws OutOfBoundsError outside the footprint.
    Location locate(double x, double y) const;

    /// Maps global surface parameters (v,w) in [0,1]^2 onto the footprint.
    Eigen::Vector2d xy_from_parameters(double v, double w) const;

    /// Largest control height among samples influencing [x0,x1] x [y0,y1].
    double max_sample_in(double x0, double x1, double y0, double y1) const;

private:
    ControlGrid grid_;
};

double height_at(const TerrainSurface& surface, double x, double y);

/// dz/dx, dz/dy of the surface.
Eigen::Vector2d gradient_at(const TerrainSurface& surface, double x, double y);

/// Upward unit normal (positive z component).
Eigen::Vector3d normal_at(const TerrainSurface& surface, double x, double y);

/// Path over the surface: a uniform cubic B-spline in global (v,w) parameter
/// space. Four control points give a single segment [v(u) w(u)] = U R C;
/// longer polygons chain segments with C2 joins.
struct SurfacePath
{
    Eigen::Matrix<double, Eigen::Dynamic, 2> control; // n x 2, n >= 4, columns (v, w)

    void validate() const;
};

/// (v(u), w(u)) of the path, u in [0,1]. Throws DomainError for u outside [0,1].
Eigen::Vector2d path_parameters(const SurfacePath& path, double u);

/// d(v,w)/du.
Eigen::Vector2d path_tangent(const SurfacePath& path, double u);

/// Surface point under the path at u. Throws DomainError if (v(u), w(u))
/// leaves the unit square.
Eigen::Vector3d eval_path(const SurfacePath& path, const TerrainSurface& surface, double u);

} // namespace vpose
