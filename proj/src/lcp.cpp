#include "vpose/lcp.hpp"
#include "vpose/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>
#include <vector>

namespace vpose
{

const char* to_string(LcpStatus status)
{
    switch (status)
    {
    case LcpStatus::Solved: return "solved";
    case LcpStatus::RayTermination: return "ray_termination";
    case LcpStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

namespace
{

// Tableau  [ I | -M | -e | q ]  over variables w (0..n-1), z (n..2n-1), z0 (2n).
class LemkeTableau
{
public:
    LemkeTableau(const Eigen::MatrixXd& M, const Eigen::VectorXd& q) : n_(q.size()), T_(n_, 2 * n_ + 2), basis_(n_)
    {
        T_.setZero();
        T_.leftCols(n_).setIdentity();
        T_.middleCols(n_, n_) = -M;
        T_.col(2 * n_).setConstant(-1.0);
        T_.col(2 * n_ + 1) = q;
        for (Eigen::Index i = 0; i < n_; ++i)
            basis_[static_cast<std::size_t>(i)] = i;
    }

    Eigen::Index artificial() const { return 2 * n_; }
    Eigen::Index complement(Eigen::Index var) const { return var < n_ ? var + n_ : var - n_; }
    double rhs(Eigen::Index row) const { return T_(row, 2 * n_ + 1); }

    /// Pivots `entering` into the basis at `row`; returns the leaving variable.
    Eigen::Index pivot(Eigen::Index row, Eigen::Index entering)
    {
        T_.row(row) /= T_(row, entering);
        for (Eigen::Index i = 0; i < n_; ++i)
        {
            if (i == row)
                continue;
            const double factor = T_(i, entering);
            if (factor != 0.0)
                T_.row(i) -= factor * T_.row(row);
        }
        const Eigen::Index leaving = basis_[static_cast<std::size_t>(row)];
        basis_[static_cast<std::size_t>(row)] = entering;
        return leaving;
    }

    /// Lexicographic minimum-ratio row for the entering column, -1 if unbounded.
    Eigen::Index ratio_row(Eigen::Index entering, double pivot_tol) const
    {
        Eigen::Index best = -1;
        for (Eigen::Index i = 0; i < n_; ++i)
        {
            const double d = T_(i, entering);
            if (d <= pivot_tol)
                continue;
            if (best < 0 || lex_less(i, d, best, T_(best, entering)))
                best = i;
        }
        return best;
    }

    /// First pivot: z0 enters at the row of the most negative q (lexicographic ties).
    Eigen::Index initial_row() const
    {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < n_; ++i)
            if (lex_less(i, 1.0, best, 1.0))
                best = i;
        return best;
    }

    Eigen::VectorXd values(Eigen::Index first, Eigen::Index count) const
    {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(count);
        for (Eigen::Index i = 0; i < n_; ++i)
        {
            const Eigen::Index var = basis_[static_cast<std::size_t>(i)];
            if (var >= first && var < first + count)
                x(var - first) = rhs(i);
        }
        return x;
    }

private:
    // Compares rows (rhs, B^-1 row) / d lexicographically.
    bool lex_less(Eigen::Index a, double da, Eigen::Index b, double db) const
    {
        const double scale = 1e-12;
        auto key = [&](Eigen::Index row, double d, Eigen::Index k) {
            const double v = k < 0 ? rhs(row) : T_(row, k);
            return v / d;
        };
        for (Eigen::Index k = -1; k < n_; ++k)
        {
            const double ka = key(a, da, k), kb = key(b, db, k);
            const double tol = scale * std::max({1.0, std::abs(ka), std::abs(kb)});
            if (ka < kb - tol)
                return true;
            if (ka > kb + tol)
                return false;
        }
        return false;
    }

    Eigen::Index n_;
    Eigen::MatrixXd T_;
    std::vector<Eigen::Index> basis_;
};

} // namespace

LcpSolution lemke_solve(const LcpProblem& prob, int max_pivots)
{
    const Eigen::Index n = prob.q.size();
    if (prob.M.rows() != n || prob.M.cols() != n)
        throw DomainError("LCP matrix and vector dimensions differ");
    if (!prob.M.allFinite() || !prob.q.allFinite())
        throw DomainError("LCP data must be finite");

    LcpSolution sol;
    sol.z = Eigen::VectorXd::Zero(n);
    sol.w = prob.q;
    if (n == 0 || prob.q.minCoeff() >= 0.0)
        return sol;
    if (max_pivots <= 0)
        max_pivots = static_cast<int>(50 * n);

    // Work on a scaled copy; z is scale-invariant, w scales with the factor.
    const double m_max = prob.M.cwiseAbs().maxCoeff();
    const double m_scale = m_max > 0.0 ? m_max : prob.q.cwiseAbs().maxCoeff();
    LemkeTableau T(prob.M / m_scale, prob.q / m_scale);
    constexpr double pivot_tol = 1e-12;

    Eigen::Index leaving = T.pivot(T.initial_row(), T.artificial());
    sol.pivots = 1;
    while (true)
    {
        if (leaving == T.artificial())
        {
            sol.status = LcpStatus::Solved;
            break;
        }
        if (sol.pivots >= max_pivots)
        {
            sol.status = LcpStatus::IterationLimit;
            break;
        }
        const Eigen::Index entering = T.complement(leaving);
        const Eigen::Index row = T.ratio_row(entering, pivot_tol);
        if (row < 0)
        {
            sol.status = LcpStatus::RayTermination;
            break;
        }
        leaving = T.pivot(row, entering);
        ++sol.pivots;
    }

    sol.z = T.values(n, n);
    sol.w = T.values(0, n) * m_scale;
    return sol;
}

Eigen::VectorXd lcp_contact_forces(const ContactProblem& prob, const LcpContactOptions& options)
{
    const Eigen::Index p = prob.size();
    if (p == 0)
        return Eigen::VectorXd(0);

    LcpProblem lcp{prob.A, prob.b};
    const double mean_diag = prob.A.diagonal().mean();
    const double delta = options.regularization > 0.0 && mean_diag > 0.0 ? options.regularization * mean_diag : 0.0;
    lcp.M.diagonal().array() += delta;

    Eigen::VectorXd z;
    for (int k = 0; k <= std::max(0, options.proximal_steps); ++k)
    {
        if (k > 0)
            lcp.q = prob.b - delta * z;
        const LcpSolution sol = lemke_solve(lcp, options.max_pivots);
        if (sol.status != LcpStatus::Solved)
            throw SolverError(std::string("Lemke solver terminated with status ") + to_string(sol.status));
        z = sol.z;
        if (delta == 0.0)
            break;
    }
    return z;
}

} // namespace vpose
