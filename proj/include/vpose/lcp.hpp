#pragma once

#include "vpose/contact_svd.hpp"

#include <Eigen/Dense>

namespace vpose
{

/// Find z, w >= 0 with w = M z + q and z^T w = 0.
struct LcpProblem
{
    Eigen::MatrixXd M;
    Eigen::VectorXd q;
};

enum class LcpStatus
{
    Solved,
    RayTermination,
    IterationLimit
};

const char* to_string(LcpStatus status);

struct LcpSolution
{
    Eigen::VectorXd z;
    Eigen::VectorXd w;
    LcpStatus status = LcpStatus::Solved;
    int pivots = 0;
};

/// Lemke's complementary pivoting with covering vector e = (1,...,1) and a
/// lexicographic minimum-ratio test. max_pivots <= 0 selects 50 * n.
LcpSolution lemke_solve(const LcpProblem& prob, int max_pivots = 0);

struct LcpContactOptions
{
    /// Diagonal shift added to A, relative to mean(diag(A)). The contact matrix
    /// has rank <= 3, so with more than three contacts the LCP has a continuum
    /// of force solutions; the shift selects the least-norm one.
    double regularization = 1e-6;
    int max_pivots = 0;
    /// Extra proximal solves LCP(A + delta I, b - delta f_k), each shrinking the
    /// bias the shift puts on the forces by about delta / sigma_min(A).
    int proximal_steps = 3;
};

/// Contact forces from LCP(A + delta I, b): forces and next-step gaps are
/// complementary. Throws SolverError unless Lemke terminates with a solution.
Eigen::VectorXd lcp_contact_forces(const ContactProblem& prob, const LcpContactOptions& options = {});

} // namespace vpose
