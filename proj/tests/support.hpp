#pragma once

#include "vpose/terrain.hpp"
#include "vpose/vehicle.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>

namespace vpose::testing
{

inline ControlGrid sampled_grid(Eigen::Index rows, Eigen::Index cols, double ox, double oy, double spacing,
                                const std::function<double(double, double)>& f)
{
    ControlGrid g;
    g.rows = rows;
    g.cols = cols;
    g.origin_x = ox;
    g.origin_y = oy;
    g.spacing = spacing;
    g.heights.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            g.heights(r, c) = f(ox + c * spacing, oy + r * spacing);
    return g;
}

/// 6 m x 6 m grid centered on the origin, 0.25 m spacing.
inline ControlGrid square_grid(const std::function<double(double, double)>& f)
{
    return sampled_grid(25, 25, -3.0, -3.0, 0.25, f);
}

inline VehicleModel six_wheel()
{
    VehicleModel m;
    m.mass = 500.0;
    const Eigen::Vector2d I = box_inertia(500.0, 1.5, 0.9, 0.5);
    m.inertia_roll = I(0);
    m.inertia_pitch = I(1);
    m.wheels.resize(3, 6);
    m.wheels << 0.75, 0.0, -0.75, 0.75, 0.0, -0.75,
                0.45, 0.45, 0.45, -0.45, -0.45, -0.45,
                -0.45, -0.45, -0.45, -0.45, -0.45, -0.45;
    return m;
}

inline VehicleModel four_wheel()
{
    VehicleModel m;
    m.mass = 400.0;
    const Eigen::Vector2d I = box_inertia(400.0, 1.2, 0.8, 0.45);
    m.inertia_roll = I(0);
    m.inertia_pitch = I(1);
    m.wheels.resize(3, 4);
    m.wheels << 0.5, -0.5, 0.5, -0.5,
                0.35, 0.35, -0.35, -0.35,
                -0.35, -0.35, -0.35, -0.35;
    return m;
}

/// Random symmetric PSD matrix of the given size and rank.
inline Eigen::MatrixXd random_psd(std::mt19937& rng, int n, int rank)
{
    std::normal_distribution<double> N;
    Eigen::MatrixXd B(n, rank);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j)
            B(i, j) = N(rng);
    return B * B.transpose();
}

/// Random symmetric PSD matrix Q diag(lambda) Q^T with `rank` eigenvalues drawn
/// from [0.1, 10] and the rest exactly zero.
inline Eigen::MatrixXd random_psd_spectrum(std::mt19937& rng, int n, int rank)
{
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> L(0.1, 10.0);
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            G(i, j) = N(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < rank; ++i)
        lambda(i) = L(rng);
    return Q * lambda.asDiagonal() * Q.transpose();
}

} // namespace vpose::testing
