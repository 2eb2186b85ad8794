#include "vpose/contact_svd.hpp"
#include "vpose/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace vpose
{

void SvdThreshold::validate() const
{
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("SVD threshold epsilon must lie in (0, 1)");
}

ContactProblem assemble(const WrenchMatrices& W, const Eigen::DiagonalMatrix<double, 3>& M,
                        const Eigen::Vector3d& v_prev, const Eigen::VectorXd& d_prev, double dt,
                        std::vector<Eigen::Index> active)
{
    if (!(dt > 0.0))
        throw DomainError("time step must be positive");
    const Eigen::Index p = W.contact.cols();
    if (d_prev.size() != p)
        throw DomainError("gap vector size does not match wrench columns");
    if (active.empty())
    {
        active.resize(static_cast<std::size_t>(p));
        std::iota(active.begin(), active.end(), Eigen::Index{0});
    }
    else if (static_cast<Eigen::Index>(active.size()) != p)
        throw DomainError("active index list does not match wrench columns");

    const Eigen::Vector3d m_inv = M.diagonal().cwiseInverse();

    ContactProblem prob;
    prob.active = std::move(active);
    prob.factor = dt * (m_inv.cwiseSqrt().asDiagonal() * W.contact);
    prob.A = prob.factor.transpose() * prob.factor;
    prob.b = d_prev + dt * W.contact.transpose() * (v_prev + dt * m_inv.asDiagonal() * W.gravity);
    return prob;
}

ContactProblem restrict_problem(const ContactProblem& prob, const std::vector<Eigen::Index>& local)
{
    const auto n = static_cast<Eigen::Index>(local.size());
    ContactProblem sub;
    sub.A.resize(n, n);
    sub.b.resize(n);
    if (prob.has_factor())
        sub.factor.resize(3, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const Eigen::Index li = local[static_cast<std::size_t>(i)];
        if (li < 0 || li >= prob.size())
            throw DomainError("sub-problem index out of range");
        sub.b(i) = prob.b(li);
        for (Eigen::Index j = 0; j < n; ++j)
            sub.A(i, j) = prob.A(li, local[static_cast<std::size_t>(j)]);
        if (prob.has_factor())
            sub.factor.col(i) = prob.factor.col(li);
        sub.active.push_back(static_cast<std::size_t>(li) < prob.active.size() ? prob.active[static_cast<std::size_t>(li)] : li);
    }
    return sub;
}

Eigen::VectorXd min_norm_forces(const ContactProblem& prob, const std::vector<Eigen::Index>& subset,
                                SvdThreshold eps)
{
    const Eigen::Index p = prob.size();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(p);
    const auto n = static_cast<Eigen::Index>(subset.size());
    if (n == 0)
        return f;

    Eigen::VectorXd b_s(n);
    for (Eigen::Index i = 0; i < n; ++i)
        b_s(i) = prob.b(subset[static_cast<std::size_t>(i)]);

    Eigen::VectorXd f_s;
    if (prob.has_factor())
    {
        // A_ss = B^T B. With B B^T = U diag(s) U^T, the columns V_j = B^T u_j / sqrt(s_j)
        // give A_ss = V diag(s) V^T, an SVD of A_ss whose nonzero singular values are s.
        bool identity = n == p;
        for (Eigen::Index i = 0; identity && i < n; ++i)
            identity = subset[static_cast<std::size_t>(i)] == i;
        Eigen::Matrix<double, 3, Eigen::Dynamic> gathered;
        if (!identity)
        {
            gathered.resize(3, n);
            for (Eigen::Index i = 0; i < n; ++i)
                gathered.col(i) = prob.factor.col(subset[static_cast<std::size_t>(i)]);
        }
        const Eigen::Matrix<double, 3, Eigen::Dynamic>& B = identity ? prob.factor : gathered;
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(B * B.transpose());
        const Eigen::Vector3d sigma = eig.eigenvalues().cwiseMax(0.0);
        const double sigma_max = sigma.maxCoeff();
        // A# b = sum_j V_j V_j^T b / s_j = B^T sum_j u_j (u_j^T B b) / s_j^2
        const Eigen::Vector3d Bb = B * b_s;
        Eigen::Vector3d coeff = Eigen::Vector3d::Zero();
        for (int j = 0; j < 3; ++j)
            if (sigma(j) > 0.0 && sigma(j) / sigma_max >= eps.epsilon)
                coeff += eig.eigenvectors().col(j) * (eig.eigenvectors().col(j).dot(Bb) / (sigma(j) * sigma(j)));
        f_s = -(B.transpose() * coeff);
    }
    else
    {
        Eigen::MatrixXd A_ss(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                A_ss(i, j) = prob.A(subset[static_cast<std::size_t>(i)], subset[static_cast<std::size_t>(j)]);
        f_s = -(pseudo_inverse(A_ss, eps) * b_s);
    }

    for (Eigen::Index i = 0; i < n; ++i)
        f(subset[static_cast<std::size_t>(i)]) = f_s(i);
    return f;
}

ClampResult clamp_active_set(const ContactProblem& prob, const Eigen::VectorXd& f, SvdThreshold eps)
{
    const Eigen::Index p = prob.size();
    if (f.size() != p)
        throw DomainError("force vector size does not match contact problem");

    ClampResult result;
    result.forces = f;
    result.active.resize(static_cast<std::size_t>(p));
    std::iota(result.active.begin(), result.active.end(), Eigen::Index{0});
    if (p == 0)
        return result;

    std::vector<bool> in_set(static_cast<std::size_t>(p), true);
    std::set<std::vector<bool>> visited; // filled from the first change on

    // Forces and gaps within roundoff of zero are not treated as violations.
    auto force_tol = [](const Eigen::VectorXd& x) { return 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff()); };
    const double gap_tol = 1e-9 * prob.b.cwiseAbs().maxCoeff();
    const int readmit_limit = static_cast<int>(4 * p);

    while (true)
    {
        if (!result.forces.allFinite())
            throw SolverError("active-set clamp produced non-finite forces");

        Eigen::Index worst = -1;
        const double tol = force_tol(result.forces);
        for (Eigen::Index j : result.active)
            if (result.forces(j) < -tol && (worst < 0 || result.forces(j) < result.forces(worst)))
                worst = j;

        bool admit = false;
        if (worst < 0 && !result.readmission_stopped)
        {
            const Eigen::VectorXd gap = prob.A * result.forces + prob.b;
            for (Eigen::Index j = 0; j < p; ++j)
                if (!in_set[static_cast<std::size_t>(j)] && gap(j) < -gap_tol && (worst < 0 || gap(j) < gap(worst)))
                    worst = j;
            if (worst >= 0)
            {
                std::vector<bool> next = in_set;
                next[static_cast<std::size_t>(worst)] = true;
                if (result.resolves >= readmit_limit || visited.count(next))
                {
                    // Cycling: finish with plain removal, which terminates.
                    result.readmission_stopped = true;
                    break;
                }
                admit = true;
            }
        }
        if (worst < 0)
            break;

        if (admit)
            result.active.insert(std::lower_bound(result.active.begin(), result.active.end(), worst), worst);
        else
            result.active.erase(std::find(result.active.begin(), result.active.end(), worst));
        in_set[static_cast<std::size_t>(worst)] = admit;
        if (visited.empty())
            visited.insert(std::vector<bool>(static_cast<std::size_t>(p), true));
        visited.insert(in_set);
        result.forces = min_norm_forces(prob, result.active, eps);
        ++result.resolves;
    }
    result.forces = result.forces.cwiseMax(0.0);
    return result;
}

Eigen::VectorXd solve_forces(const ContactProblem& prob, SvdThreshold eps)
{
    std::vector<Eigen::Index> all(static_cast<std::size_t>(prob.size()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    return clamp_active_set(prob, min_norm_forces(prob, all, eps), eps).forces;
}

} // namespace vpose
