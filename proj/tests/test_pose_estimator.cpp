#include "support.hpp"

#include "vpose/errors.hpp"
#include "vpose/pose_estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace vpose;
using vpose::testing::four_wheel;
using vpose::testing::six_wheel;
using vpose::testing::square_grid;

namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;

TerrainSurface flat()
{
    return TerrainSurface(square_grid([](double, double) { return 0.0; }));
}

TerrainSurface plane(double a, double b, double c = 0.0)
{
    return TerrainSurface(square_grid([=](double x, double y) { return a * x + b * y + c; }));
}

/// Net contact wrench about the COM from per-wheel vertical forces at the equilibrium pose.
Eigen::Vector3d contact_wrench(const VehicleModel& m, const Placement& h, const PoseResult& r)
{
    std::vector<Eigen::Index> all;
    for (Eigen::Index j = 0; j < m.wheel_count(); ++j)
        all.push_back(j);
    return build_wrench(m, h, r.q, all).contact * r.forces;
}

void expect_static_balance(const VehicleModel& m, const Placement& h, const PoseResult& r)
{
    const double mg = m.mass * kGravity;
    const Eigen::Vector3d net = contact_wrench(m, h, r);
    EXPECT_LE(std::abs(net(0) - mg), 1e-3 * mg);
    EXPECT_LE(std::abs(net(1)), 1e-3 * mg * m.length());
    EXPECT_LE(std::abs(net(2)), 1e-3 * mg * m.length());
    EXPECT_GE(r.forces.minCoeff(), 0.0);
    EXPECT_GE(r.gaps.minCoeff(), -SolverParams{}.d_epsilon);
    int contacts = 0;
    for (std::size_t j = 0; j < r.contacts.size(); ++j)
    {
        contacts += r.contacts[j];
        EXPECT_EQ(r.contacts[j], r.gaps(static_cast<Eigen::Index>(j)) < SolverParams{}.d_epsilon);
    }
    EXPECT_GE(contacts, 1);
}

} // namespace

TEST(SolverParams, Validates)
{
    EXPECT_NO_THROW(SolverParams{}.validate());
    SolverParams p;
    p.dt = 0.0;
    EXPECT_THROW(p.validate(), DomainError);
    p = {};
    p.max_iterations = 0;
    EXPECT_THROW(p.validate(), DomainError);
    p = {};
    p.svd_epsilon = 2.0;
    EXPECT_THROW(p.validate(), DomainError);
}

TEST(Step, FreeFall)
{
    const VehicleModel m = six_wheel();
    const TerrainSurface s = flat();
    const SolverParams params;
    const DropState s0 = initial_state(m, s, {}, params, 1.0);
    const DropState s1 = step(s0, m, s, {}, params);
    EXPECT_LT((s1.accel - Eigen::Vector3d(-kGravity, 0, 0)).norm(), 1e-12);
    EXPECT_LT((s1.v - Eigen::Vector3d(-kGravity * params.dt, 0, 0)).norm(), 1e-15);
    EXPECT_NEAR(s1.q(0), 1.0 - kGravity * params.dt * params.dt, 1e-15);
    EXPECT_EQ(s1.forces, Eigen::VectorXd::Zero(6));
    EXPECT_EQ(s1.iteration, 1);
}

TEST(Step, RestingOnFlatGround)
{
    const VehicleModel m = six_wheel();
    const TerrainSurface s = flat();
    const SolverParams params;
    DropState st;
    st.q = Eigen::Vector3d(0.45, 0, 0);
    st.d = gap_vector(m, {}, st.q, s);
    const DropState next = step(st, m, s, {}, params);
    EXPECT_NEAR(next.forces.sum(), 4900.0, 1e-6);
    EXPECT_LT(next.v.norm(), 1e-12);
    EXPECT_LT((next.q - st.q).norm(), 1e-15);
}

TEST(Step, OneWheelToyModel)
{
    VehicleModel m;
    m.mass = 20.0;
    m.inertia_roll = 1.0;
    m.inertia_pitch = 1.0;
    m.wheels = Eigen::Vector3d(0, 0, -0.3);
    const TerrainSurface s = flat();
    DropState st;
    st.q = Eigen::Vector3d(0.3, 0, 0);
    st.d = gap_vector(m, {}, st.q, s);
    const DropState next = step(st, m, s, {}, SolverParams{});
    EXPECT_NEAR(next.forces(0), 20.0 * kGravity, 1e-9);
    EXPECT_LT(next.accel.norm(), 1e-9);
}

TEST(Step, OpeningWheelsCarryNoForce)
{
    // A wheel inside the contact band but moving away gets no force.
    const VehicleModel m = six_wheel();
    const TerrainSurface s = flat();
    DropState st;
    st.q = Eigen::Vector3d(0.455, 0, 0);
    st.v = Eigen::Vector3d(1.0, 0, 0);
    st.d = gap_vector(m, {}, st.q, s);
    const DropState next = step(st, m, s, {}, SolverParams{});
    EXPECT_EQ(next.forces, Eigen::VectorXd::Zero(6));
}

TEST(InitialState, RejectsStartBelowTerrain)
{
    EXPECT_THROW(initial_state(six_wheel(), flat(), {}, SolverParams{}, 0.4), DomainError);
    EXPECT_THROW(initial_state(six_wheel(), flat(), {}, SolverParams{}, 0.45), DomainError);
}

TEST(DefaultZStart, ClearsHighestSample)
{
    const TerrainSurface s(square_grid([](double x, double y) { return 0.3 * std::exp(-(x * x + y * y)); }));
    const double z = default_z_start(six_wheel(), s, {}, 0.5);
    EXPECT_NEAR(z, 0.3 + 0.45 + 0.5, 1e-12);
    EXPECT_GT(gap_vector(six_wheel(), {}, Eigen::Vector3d(z, 0, 0), s).minCoeff(), 0.49);
}

TEST(EstimatePose, FlatGroundSymmetric)
{
    const VehicleModel m = six_wheel();
    const PoseResult r = estimate_pose({}, m, flat(), SolverParams{});
    EXPECT_NEAR(r.q(0), 0.45, 1e-6);
    EXPECT_LT(std::abs(r.q(1)), 1e-6);
    EXPECT_LT(std::abs(r.q(2)), 1e-6);
    for (bool c : r.contacts)
        EXPECT_TRUE(c);
    for (Eigen::Index j = 0; j < 6; ++j)
        EXPECT_NEAR(r.forces(j), 4900.0 / 6.0, 8.167);
    EXPECT_NEAR(r.forces.sum(), 4900.0, 4.9);
    EXPECT_GT(r.iterations, 0);
    EXPECT_GE(r.elapsed, 0.0);
    expect_static_balance(m, {}, r);
}

TEST(EstimatePose, RampPlaneFitOracle)
{
    const double a = std::tan(10.0 * kDeg);
    const VehicleModel m = six_wheel();
    const PoseResult r = estimate_pose({}, m, plane(a, 0.0), SolverParams{});
    // Coplanar wheels resting on z = a x + b y align the body z axis with the
    // plane normal: pitch = -atan(a), tan(roll) = b / sqrt(1 + a^2).
    EXPECT_NEAR(r.q(2), -std::atan(a), 0.1 * kDeg);
    EXPECT_LT(std::abs(r.q(1)), 1e-4);
    expect_static_balance(m, {}, r);
}

TEST(EstimatePose, TiltedPlaneBothAxes)
{
    const double a = 0.12, b = -0.08;
    const VehicleModel m = six_wheel();
    const Placement h{0.3, -0.2, 0.0};
    const PoseResult r = estimate_pose(h, m, plane(a, b), SolverParams{});
    EXPECT_NEAR(r.q(2), -std::atan(a), 0.1 * kDeg);
    EXPECT_NEAR(r.q(1), std::atan(b / std::sqrt(1 + a * a)), 0.1 * kDeg);
    // All six coplanar wheels touch the plane.
    EXPECT_LT(r.gaps.cwiseAbs().maxCoeff(), SolverParams{}.d_epsilon);
    expect_static_balance(m, h, r);
}

TEST(EstimatePose, YawSymmetryOnFlatGround)
{
    const VehicleModel m = six_wheel();
    const PoseResult ref = estimate_pose({}, m, flat(), SolverParams{});
    for (double yaw : {0.3, 1.2, -2.0, std::numbers::pi})
    {
        const PoseResult r = estimate_pose({0, 0, yaw}, m, flat(), SolverParams{});
        EXPECT_NEAR(r.q(0), ref.q(0), 1e-9);
        EXPECT_LT(std::abs(r.q(1)), 1e-6);
        EXPECT_LT(std::abs(r.q(2)), 1e-6);
    }
}

TEST(EstimatePose, TranslationInvariance)
{
    const VehicleModel m = six_wheel();
    auto bumpy = [](double x, double y) { return 0.1 * std::sin(2 * x) * std::cos(3 * y); };
    const double c = 0.7;
    const TerrainSurface s0(square_grid(bumpy));
    const TerrainSurface s1(square_grid([&](double x, double y) { return bumpy(x, y) + c; }));
    const PoseResult r0 = estimate_pose({0.2, 0.1, 0.4}, m, s0, SolverParams{}, 1.0);
    const PoseResult r1 = estimate_pose({0.2, 0.1, 0.4}, m, s1, SolverParams{}, 1.0 + c);
    EXPECT_NEAR(r1.q(0), r0.q(0) + c, 1e-9);
    EXPECT_NEAR(r1.q(1), r0.q(1), 1e-9);
    EXPECT_NEAR(r1.q(2), r0.q(2), 1e-9);
    EXPECT_LT((r1.forces - r0.forces).cwiseAbs().maxCoeff(), 1e-6 * m.mass * kGravity);
    EXPECT_EQ(r0.contacts, r1.contacts);
}

TEST(EstimatePose, Deterministic)
{
    const VehicleModel m = six_wheel();
    const TerrainSurface s(square_grid([](double x, double y) { return 0.1 * std::sin(2 * x + y); }));
    const PoseResult a = estimate_pose({0.1, 0.2, 0.3}, m, s, SolverParams{});
    const PoseResult b = estimate_pose({0.1, 0.2, 0.3}, m, s, SolverParams{});
    EXPECT_EQ(a.q, b.q);
    EXPECT_EQ(a.forces, b.forces);
    EXPECT_EQ(a.gaps, b.gaps);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(EstimatePose, FrontBumpLeavesFourContacts)
{
    const VehicleModel m = six_wheel();
    const TerrainSurface s(square_grid([](double x, double y) {
        return 0.2 * std::exp(-std::pow(x - 0.75, 2) / 0.08 - y * y / 0.72);
    }));
    const PoseResult r = estimate_pose({}, m, s, SolverParams{});
    EXPECT_EQ(std::count(r.contacts.begin(), r.contacts.end(), true), 4);
    EXPECT_FALSE(r.contacts[1]);
    EXPECT_FALSE(r.contacts[4]);
    expect_static_balance(m, {}, r);
}

TEST(EstimatePose, RandomTerrainsSatisfyStaticBalance)
{
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> A(-0.15, 0.15), F(0.5, 3.0), Y(-3.0, 3.0);
    for (int trial = 0; trial < 8; ++trial)
    {
        const double a = A(rng), b = A(rng), fx = F(rng), fy = F(rng);
        const TerrainSurface s(square_grid([=](double x, double y) {
            return a * std::sin(fx * x) + b * std::cos(fy * y) + 0.5 * a * x;
        }));
        const VehicleModel m = trial % 2 ? six_wheel() : four_wheel();
        const Placement h{0.1 * trial - 0.4, 0.05 * trial - 0.2, Y(rng)};
        const PoseResult r = estimate_pose(h, m, s, SolverParams{});
        expect_static_balance(m, h, r);
    }
}

TEST(EstimatePose, NormalModeOnFlatGroundMatchesVertical)
{
    const VehicleModel m = six_wheel();
    SolverParams p;
    p.mode = ForceMode::Normal;
    const PoseResult r = estimate_pose({}, m, flat(), p);
    EXPECT_NEAR(r.q(0), 0.45, 1e-6);
    EXPECT_NEAR(r.forces.sum(), 4900.0, 4.9);
}

TEST(EstimatePose, NormalModeOnRampSettles)
{
    const VehicleModel m = six_wheel();
    SolverParams p;
    p.mode = ForceMode::Normal;
    const PoseResult r = estimate_pose({}, m, plane(std::tan(10.0 * kDeg), 0.0), p);
    EXPECT_NEAR(r.q(2), -10.0 * kDeg, 0.1 * kDeg);
    // Only the vertical components of normal forces carry the weight.
    EXPECT_GT(r.forces.sum(), 4900.0 * 0.999);
}

TEST(EstimatePose, ConvergenceErrorCarriesLastState)
{
    SolverParams p;
    p.max_iterations = 10;
    try
    {
        estimate_pose({}, six_wheel(), flat(), p);
        FAIL() << "expected ConvergenceError";
    }
    catch (const ConvergenceError& e)
    {
        EXPECT_EQ(e.last_state().iteration, 10);
        EXPECT_LT(e.last_state().v(0), 0.0);
    }
}

TEST(EstimatePose, OffTerrainThrows)
{
    EXPECT_THROW(estimate_pose({2.6, 0, 0}, six_wheel(), flat(), SolverParams{}), OutOfBoundsError);
}

TEST(Trace, RecordsEveryIteration)
{
    VehicleModel m = six_wheel();
    m.wheels.row(2).setZero();
    std::vector<TraceRecord> records;
    const PoseResult r =
        estimate_pose({}, m, flat(), SolverParams{}, 0.5, [&](const TraceRecord& rec) { records.push_back(rec); });
    ASSERT_EQ(static_cast<int>(records.size()), r.iterations);
    for (Eigen::Index j = 0; j < 6; ++j)
        EXPECT_DOUBLE_EQ(records.front().d(j), 0.5);
    EXPECT_EQ(records.front().iteration, 1);
    EXPECT_TRUE(records.back().terminal);
    for (std::size_t i = 0; i + 1 < records.size(); ++i)
        ASSERT_FALSE(records[i].terminal);
    EXPECT_LT(reduced_norm(records.back().v, m.length()), SolverParams{}.vel_tol);
    EXPECT_EQ(records.back().q, r.q);
}

TEST(ReducedNorm, WeightsAngularTerms)
{
    EXPECT_DOUBLE_EQ(reduced_norm(Eigen::Vector3d(3, 0, 0), 2.0), 3.0);
    EXPECT_DOUBLE_EQ(reduced_norm(Eigen::Vector3d(0, 1.5, 2.0), 2.0), 5.0);
}

namespace
{

SurfacePath straight_x(const TerrainSurface& s, double x0, double x1, double y)
{
    const auto fp = s.footprint();
    SurfacePath p;
    p.control.resize(5, 2);
    for (int i = 0; i < 5; ++i)
    {
        const double x = x0 + (x1 - x0) * i / 4.0;
        p.control(i, 0) = (y - fp.y_min) / (fp.y_max - fp.y_min);
        p.control(i, 1) = (x - fp.x_min) / (fp.x_max - fp.x_min);
    }
    return p;
}

} // namespace

TEST(PlacementOnPath, HeadingFollowsTangent)
{
    const TerrainSurface s = flat();
    const Placement h = placement_on_path(straight_x(s, -1.0, 1.0, 0.0), s, 0.5);
    EXPECT_NEAR(h.yaw, 0.0, 1e-9);
    EXPECT_NEAR(h.x, 0.0, 1e-9);
    const Placement back = placement_on_path(straight_x(s, 1.0, -1.0, 0.5), s, 0.0);
    EXPECT_NEAR(std::abs(back.yaw), std::numbers::pi, 1e-9);
}

TEST(PoseAlongPath, FlatPathIsLevel)
{
    const TerrainSurface s = flat();
    const auto samples = pose_along_path(straight_x(s, -1.0, 1.0, 0.2), six_wheel(), s, SolverParams{}, 6);
    ASSERT_EQ(samples.size(), 6u);
    for (const auto& smp : samples)
    {
        EXPECT_NEAR(smp.pose.q(0), samples.front().pose.q(0), 1e-9);
        EXPECT_LT(std::abs(smp.pose.q(1)), 1e-6);
        EXPECT_LT(std::abs(smp.pose.q(2)), 1e-6);
    }
    EXPECT_DOUBLE_EQ(samples.front().u, 0.0);
    EXPECT_DOUBLE_EQ(samples.back().u, 1.0);
}

TEST(PoseAlongPath, RampPitchIsConstant)
{
    const double a = std::tan(10.0 * kDeg);
    const TerrainSurface s = plane(a, 0.0);
    const auto samples = pose_along_path(straight_x(s, -1.0, 1.0, 0.0), six_wheel(), s, SolverParams{}, 5);
    for (const auto& smp : samples)
        EXPECT_NEAR(smp.pose.q(2), -std::atan(a), 0.1 * kDeg);
}

TEST(PoseAlongPath, ContactsSwitchOverSmallRock)
{
    const TerrainSurface s(square_grid([](double x, double y) {
        return 0.12 * std::exp(-(x * x + (y - 0.35) * (y - 0.35)) / (2 * 0.15 * 0.15));
    }));
    const auto samples = pose_along_path(straight_x(s, -1.5, 1.5, 0.0), four_wheel(), s, SolverParams{}, 25);
    std::set<std::vector<bool>> patterns;
    for (const auto& smp : samples)
        patterns.insert(smp.pose.contacts);
    EXPECT_GE(patterns.size(), 3u);
}

TEST(PoseAlongPath, ThreadedMatchesSequential)
{
    const TerrainSurface s(square_grid([](double x, double y) { return 0.1 * std::sin(x) * std::cos(y); }));
    const SurfacePath path = straight_x(s, -1.0, 1.0, 0.3);
    PathOptions threaded;
    threaded.threads = 3;
    const auto a = pose_along_path(path, six_wheel(), s, SolverParams{}, 7);
    const auto b = pose_along_path(path, six_wheel(), s, SolverParams{}, 7, threaded);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_DOUBLE_EQ(a[i].u, b[i].u);
        EXPECT_NEAR(a[i].pose.q(0), b[i].pose.q(0), 1e-5);
        EXPECT_NEAR(a[i].pose.q(1), b[i].pose.q(1), 1e-4);
        EXPECT_NEAR(a[i].pose.q(2), b[i].pose.q(2), 1e-4);
        EXPECT_EQ(a[i].pose.contacts, b[i].pose.contacts);
    }
}

TEST(PoseAlongPath, Preconditions)
{
    const TerrainSurface s = flat();
    EXPECT_THROW(pose_along_path(straight_x(s, -1, 1, 0), six_wheel(), s, SolverParams{}, 1), DomainError);
}

TEST(PoseAlongPath, FailureCarriesPathParameter)
{
    const TerrainSurface s = flat();
    // The path ends at the footprint edge, so the last placements put wheels off the terrain.
    const auto fp = s.footprint();
    try
    {
        pose_along_path(straight_x(s, 0.0, fp.x_max, 0.0), six_wheel(), s, SolverParams{}, 5);
        FAIL() << "expected PathError";
    }
    catch (const PathError& e)
    {
        EXPECT_GT(e.u(), 0.0);
        EXPECT_LE(e.u(), 1.0);
    }
}

TEST(StepProblem, RoundoffGapsEnterAsZero)
{
    const VehicleModel m = six_wheel();
    const TerrainSurface s(square_grid([](double, double) { return 0.0; }));
    DropState state;
    state.d = Eigen::VectorXd::Zero(6);
    state.d << 5e-13, -5e-13, 0.0, 2e-3, 0.5, -4e-13;
    const ContactProblem p = step_problem(state, m, s, {}, SolverParams{});
    // Wheel 3 is within d_epsilon but gravity closes only dt^2 g per step, so it stays out.
    const std::vector<Eigen::Index> expected{0, 1, 2, 5};
    ASSERT_EQ(p.active, expected);

    const double dt = SolverParams{}.dt;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        EXPECT_DOUBLE_EQ(p.b(i), -dt * dt * kGravity);
}
