#pragma once

#include "vpose/vehicle.hpp"

#include <Eigen/Dense>

#include <vector>

namespace vpose
{

/// Relative singular-value cutoff: reciprocals of sigma_j with
/// sigma_j / sigma_max < epsilon are replaced by zero.
struct SvdThreshold
{
    double epsilon = 1e-10;

    void validate() const;
};

/// Gap model d = A f + b for one step over the wheels listed in `active`.
///
/// A = dt^2 W_f^T M^-1 W_f is kept together with its Gram factor
/// `factor` = dt M^-1/2 W_f (A = factor^T factor) so that the singular value
/// decomposition of A can be taken from the 3 x p factor instead of the p x p
/// product. Problems built by hand may leave `factor` empty.
struct ContactProblem
{
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<Eigen::Index> active;
    Eigen::Matrix<double, 3, Eigen::Dynamic> factor;

    Eigen::Index size() const { return b.size(); }
    bool has_factor() const { return factor.cols() == b.size() && b.size() > 0; }
};

/// A = dt^2 W_f^T M^-1 W_f,  b = d_prev + dt W_f^T (v_prev + dt M^-1 W_g G).
ContactProblem assemble(const WrenchMatrices& W, const Eigen::DiagonalMatrix<double, 3>& M,
                        const Eigen::Vector3d& v_prev, const Eigen::VectorXd& d_prev, double dt,
                        std::vector<Eigen::Index> active = {});

/// Sub-problem over the given local indices (rows/columns of A, entries of b,
/// columns of the factor, and the matching wheel ids).
ContactProblem restrict_problem(const ContactProblem& prob, const std::vector<Eigen::Index>& local);

/// Moore-Penrose pseudo-inverse with relative singular-value thresholding.
/// For A = S Sigma V^T returns V Sigma# S^T.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pseudo_inverse(const Eigen::MatrixBase<Derived>& A, SvdThreshold eps = {})
{
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    if (A.size() == 0)
        return Mat::Zero(A.cols(), A.rows());

    const Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sigma = svd.singularValues();
    const Scalar sigma_max = sigma.size() > 0 ? sigma(0) : Scalar(0);

    Vec sigma_inv = Vec::Zero(sigma.size());
    for (Eigen::Index j = 0; j < sigma.size(); ++j)
    {
        if (sigma(j) == Scalar(0) || sigma_max == Scalar(0))
            continue;
        if (std::abs(sigma(j) / sigma_max) < Scalar(eps.epsilon))
            continue;
        sigma_inv(j) = Scalar(1) / sigma(j);
    }
    return svd.matrixV() * sigma_inv.asDiagonal() * svd.matrixU().transpose();
}

/// f = -A# b restricted to the local indices in `subset` (positions within the
/// problem, not wheel ids); entries outside the subset are zero.
Eigen::VectorXd min_norm_forces(const ContactProblem& prob, const std::vector<Eigen::Index>& subset,
                                SvdThreshold eps = {});

/// Result of the non-negativity clamp.
struct ClampResult
{
    Eigen::VectorXd forces;           // one entry per problem column, all >= 0
    std::vector<Eigen::Index> active; // local indices still carrying load
    int resolves = 0;
    bool readmission_stopped = false; // re-admission hit a repeated set or the 4p limit
};

/// Drops the most negative force from the active set and re-solves until no
/// force is negative. A dropped wheel whose predicted gap A f + b then turns
/// negative is re-admitted (most penetrating first) and the loop continues.
/// Re-admission stops once it would revisit an active set or after 4p
/// re-solves; removal alone then finishes. Throws SolverError on non-finite forces.
ClampResult clamp_active_set(const ContactProblem& prob, const Eigen::VectorXd& f, SvdThreshold eps = {});

/// Non-negative contact forces: f = -A# b followed by clamp_active_set.
Eigen::VectorXd solve_forces(const ContactProblem& prob, SvdThreshold eps = {});

} // namespace vpose
