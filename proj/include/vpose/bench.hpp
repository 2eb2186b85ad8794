#pragma once

#include "vpose/contact_svd.hpp"

#include <string>
#include <vector>

namespace vpose
{

/// Timing of one contact-force method at one wheel count. Times are seconds
/// per solve.
struct BenchRecord
{
    std::string method; // "svd" or "lcp"
    int wheel_count = 0;
    int repetitions = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample stddev over repetitions, 0 when repetitions == 1
};

/// Contact problem of a k-wheel vehicle resting level on flat ground with zero
/// velocity: wheels on two rows of ceil(k/2) stations, gaps zero.
ContactProblem flat_contact_problem(int wheel_count, double dt = 1e-3);

struct BenchOptions
{
    std::vector<int> wheel_counts{4, 6, 8, 12, 16, 20, 24};
    int repetitions = 100;
    /// Each repetition times this many back-to-back solves and reports the
    /// per-solve average, which keeps sub-microsecond solves above clock resolution.
    int batch = 50;
};

/// Times solve_forces and lcp_contact_forces (solve only, not assembly) on
/// flat_contact_problem for each wheel count. Records are ordered by k with
/// the svd record before the lcp record.
std::vector<BenchRecord> run_benchmark(const BenchOptions& options = {});

/// Two-series plot data: k, mean_svd, mean_lcp, stddev_svd, stddev_lcp.
std::string bench_to_csv(const std::vector<BenchRecord>& records);

/// Records plus problem-generation metadata, as a versioned JSON document.
std::string bench_to_json(const std::vector<BenchRecord>& records, const BenchOptions& options);

} // namespace vpose
