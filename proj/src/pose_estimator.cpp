#include "vpose/pose_estimator.hpp"
#include "vpose/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace vpose
{

void SolverParams::validate() const
{
    if (!(dt > 0.0) || !(d_epsilon > 0.0) || !(accel_tol > 0.0) || !(vel_tol > 0.0) || !(svd_epsilon > 0.0) ||
        !(clearance > 0.0))
        throw DomainError("solver parameters must be positive");
    if (max_iterations < 1 || settle_steps < 1)
        throw DomainError("max_iterations and settle_steps must be at least 1");
    SvdThreshold{svd_epsilon}.validate();
}

double reduced_norm(const Eigen::Vector3d& x, double length)
{
    return Eigen::Vector3d(x(0), length * x(1), length * x(2)).norm();
}

double default_z_start(const VehicleModel& model, const TerrainSurface& surface, const Placement& h, double clearance)
{
    const Eigen::Matrix3Xd level = wheel_world_points(model, h, Eigen::Vector3d::Zero());
    const double highest = surface.max_sample_in(level.row(0).minCoeff(), level.row(0).maxCoeff(),
                                                 level.row(1).minCoeff(), level.row(1).maxCoeff());
    return highest - level.row(2).minCoeff() + clearance;
}

DropState initial_state(const VehicleModel& model, const TerrainSurface& surface, const Placement& h,
                        const SolverParams& params, double z_start)
{
    DropState state;
    state.q = Eigen::Vector3d(z_start, 0.0, 0.0);
    state.d = gap_vector(model, h, state.q, surface, params.mode);
    state.forces = Eigen::VectorXd::Zero(model.wheel_count());
    state.accel = Eigen::Vector3d(-kGravity, 0.0, 0.0);
    if (!(state.d.minCoeff() > 0.0))
    {
        std::ostringstream msg;
        msg << "drop height z = " << z_start << " does not clear the terrain (min gap " << state.d.minCoeff() << " m)";
        throw DomainError(msg.str());
    }
    return state;
}

ContactProblem step_problem(const DropState& state, const VehicleModel& model, const TerrainSurface& surface,
                            const Placement& h, const SolverParams& params)
{
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index j = 0; j < model.wheel_count(); ++j)
        if (state.d(j) < params.d_epsilon)
            candidates.push_back(j);
    if (candidates.empty())
        return {};

    const WrenchMatrices W = build_wrench(model, h, state.q, candidates, surface, params.mode);
    Eigen::VectorXd d_c(static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t i = 0; i < candidates.size(); ++i)
    {
        const double d = state.d(candidates[i]);
        d_c(static_cast<Eigen::Index>(i)) = std::abs(d) < kGapResolution ? 0.0 : d;
    }
    const ContactProblem prob = assemble(W, model.mass_matrix(), state.v, d_c, params.dt, candidates);

    // Only wheels whose gap would close under the contact-free motion take part.
    std::vector<Eigen::Index> closing;
    for (Eigen::Index i = 0; i < prob.size(); ++i)
        if (prob.b(i) < 0.0)
            closing.push_back(i);
    return restrict_problem(prob, closing);
}

DropState step(const DropState& state, const VehicleModel& model, const TerrainSurface& surface, const Placement& h,
               const SolverParams& params)
{
    const Eigen::Index k = model.wheel_count();
    const auto M = model.mass_matrix();

    DropState next;
    next.iteration = state.iteration + 1;
    next.forces = Eigen::VectorXd::Zero(k);

    Eigen::Vector3d generalized = Eigen::Vector3d(-model.mass * kGravity, 0.0, 0.0);

    const ContactProblem prob = step_problem(state, model, surface, h, params);
    if (prob.size() > 0)
    {
        const WrenchMatrices W = build_wrench(model, h, state.q, prob.active, surface, params.mode);
        const Eigen::VectorXd f = solve_forces(prob, SvdThreshold{params.svd_epsilon});
        for (Eigen::Index i = 0; i < prob.size(); ++i)
        {
            next.forces(prob.active[static_cast<std::size_t>(i)]) = f(i);
            generalized += W.contact.col(i) * f(i);
        }
    }

    next.accel = M.inverse() * generalized;
    next.v = state.v + params.dt * next.accel;
    next.q = state.q + params.dt * next.v;
    next.d = gap_vector(model, h, next.q, surface, params.mode);

    if (next.d.minCoeff() < -params.d_epsilon)
    {
        // Lift out of the terrain by the deepest vertical penetration.
        const Eigen::VectorXd vertical = gap_vector(model, h, next.q, surface, ForceMode::Vertical);
        next.q(0) -= std::min(vertical.minCoeff(), 0.0);
        next.d = gap_vector(model, h, next.q, surface, params.mode);
    }
    return next;
}

PoseResult estimate_pose(const Placement& h, const VehicleModel& model, const TerrainSurface& surface,
                         const SolverParams& params, std::optional<double> z_start, const TraceSink& trace)
{
    using Clock = std::chrono::steady_clock;
    model.validate();
    params.validate();

    const double length = model.length();
    DropState state =
        initial_state(model, surface, h, params, z_start.value_or(default_z_start(model, surface, h, params.clearance)));

    std::optional<Clock::time_point> first_contact;
    int quiet = 0;
    bool settled = false;
    while (state.iteration < params.max_iterations)
    {
        DropState next = step(state, model, surface, h, params);
        if (!first_contact && (state.d.array() < params.d_epsilon).any())
            first_contact = Clock::now();

        const bool still = reduced_norm(next.accel, length) < params.accel_tol &&
                           reduced_norm(next.v, length) < params.vel_tol;
        quiet = still ? quiet + 1 : 0;
        settled = quiet >= params.settle_steps;

        if (trace)
        {
            TraceRecord rec;
            rec.iteration = next.iteration;
            rec.d = state.d;
            rec.forces = next.forces;
            rec.q = next.q;
            rec.v = next.v;
            rec.terminal = settled || next.iteration >= params.max_iterations;
            trace(rec);
        }
        state = std::move(next);
        if (settled)
            break;
    }

    if (!settled)
    {
        std::ostringstream msg;
        msg << "pose estimation did not reach equilibrium within " << params.max_iterations
            << " iterations (|accel| = " << reduced_norm(state.accel, length)
            << ", |v| = " << reduced_norm(state.v, length) << ")";
        throw ConvergenceError(msg.str(), state);
    }

    PoseResult result;
    result.q = state.q;
    result.forces = state.forces;
    result.gaps = state.d;
    result.iterations = state.iteration;
    result.contacts.resize(static_cast<std::size_t>(model.wheel_count()));
    for (Eigen::Index j = 0; j < model.wheel_count(); ++j)
        result.contacts[static_cast<std::size_t>(j)] = state.d(j) < params.d_epsilon;
    if (first_contact)
        result.elapsed = std::chrono::duration<double>(Clock::now() - *first_contact).count();
    return result;
}

Placement placement_on_path(const SurfacePath& path, const TerrainSurface& surface, double u)
{
    const Eigen::Vector3d p = eval_path(path, surface, u);
    // Central difference of the surface point, one-sided at the ends.
    constexpr double du = 1e-6;
    const double u0 = std::max(0.0, u - du), u1 = std::min(1.0, u + du);
    const Eigen::Vector3d tangent = eval_path(path, surface, u1) - eval_path(path, surface, u0);
    const double yaw = tangent.head<2>().norm() > 0.0 ? std::atan2(tangent.y(), tangent.x()) : 0.0;
    return {p.x(), p.y(), yaw};
}

namespace
{

PathSample run_sample(const SurfacePath& path, const VehicleModel& model, const TerrainSurface& surface,
                      const SolverParams& params, double u, std::optional<double> warm, double warm_clearance)
{
    PathSample sample;
    sample.u = u;
    try
    {
        sample.h = placement_on_path(path, surface, u);
        std::optional<double> z_start;
        if (warm)
        {
            // Warm start above the previous pose, but never below the level-clearance height.
            const Eigen::VectorXd d0 = gap_vector(model, sample.h, Eigen::Vector3d::Zero(), surface);
            z_start = std::max(*warm + warm_clearance, warm_clearance - d0.minCoeff());
        }
        sample.pose = estimate_pose(sample.h, model, surface, params, z_start);
    }
    catch (const std::exception& e)
    {
        std::ostringstream msg;
        msg << "path sample u = " << u << ": " << e.what();
        throw PathError(msg.str(), u);
    }
    return sample;
}

} // namespace

std::vector<PathSample> pose_along_path(const SurfacePath& path, const VehicleModel& model,
                                        const TerrainSurface& surface, const SolverParams& params, int samples,
                                        const PathOptions& options)
{
    if (samples < 2)
        throw DomainError("a path sweep needs at least 2 samples");
    path.validate();

    const auto n = static_cast<std::size_t>(samples);
    auto u_of = [&](std::size_t i) { return static_cast<double>(i) / static_cast<double>(samples - 1); };
    std::vector<PathSample> out(n);

    if (options.threads <= 1)
    {
        std::optional<double> warm;
        for (std::size_t i = 0; i < n; ++i)
        {
            out[i] = run_sample(path, model, surface, params, u_of(i), warm, options.warm_clearance);
            warm = out[i].pose.q(0);
        }
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                out[i] = run_sample(path, model, surface, params, u_of(i), std::nullopt, options.warm_clearance);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(options.threads, n); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace vpose
