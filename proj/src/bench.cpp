#include "vpose/bench.hpp"
#include "vpose/errors.hpp"
#include "vpose/io.hpp"
#include "vpose/lcp.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace vpose
{

namespace
{

constexpr double kBenchMass = 500.0;
constexpr double kBenchTrack = 0.9;
constexpr double kBenchPitch = 0.5;
constexpr double kBenchDepth = 0.45;

VehicleModel bench_vehicle(int k)
{
    VehicleModel model;
    model.mass = kBenchMass;
    const int stations = (k + 1) / 2;
    const double length = kBenchPitch * (stations - 1);
    const Eigen::Vector2d I = box_inertia(kBenchMass, std::max(length, kBenchTrack), kBenchTrack, 0.5);
    model.inertia_roll = I(0);
    model.inertia_pitch = I(1);
    model.wheels.resize(3, k);
    for (int j = 0; j < k; ++j)
    {
        const int station = j / 2;
        const double x = 0.5 * length - kBenchPitch * station;
        const double y = (j % 2 == 0 ? 0.5 : -0.5) * kBenchTrack;
        model.wheels.col(j) << x, y, -kBenchDepth;
    }
    return model;
}

template <typename Solve>
double time_batch(const ContactProblem& prob, int batch, Solve&& solve)
{
    using Clock = std::chrono::steady_clock;
    volatile double sink = 0.0;
    const auto t0 = Clock::now();
    for (int i = 0; i < batch; ++i)
        sink = sink + solve(prob)(0);
    return std::chrono::duration<double>(Clock::now() - t0).count() / batch;
}

BenchRecord summarize(const char* method, int k, const std::vector<double>& samples)
{
    BenchRecord r;
    r.method = method;
    r.wheel_count = k;
    r.repetitions = static_cast<int>(samples.size());
    double sum = 0.0;
    for (double s : samples)
        sum += s;
    r.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1)
    {
        double ss = 0.0;
        for (double s : samples)
            ss += (s - r.mean) * (s - r.mean);
        r.stddev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    }
    return r;
}

} // namespace

ContactProblem flat_contact_problem(int wheel_count, double dt)
{
    if (wheel_count < 1)
        throw DomainError("benchmark problems need at least one wheel");
    const VehicleModel model = bench_vehicle(wheel_count);
    std::vector<Eigen::Index> all(static_cast<std::size_t>(wheel_count));
    for (int j = 0; j < wheel_count; ++j)
        all[static_cast<std::size_t>(j)] = j;
    const WrenchMatrices W = build_wrench(model, Placement{}, Eigen::Vector3d::Zero(), all);
    return assemble(W, model.mass_matrix(), Eigen::Vector3d::Zero(), Eigen::VectorXd::Zero(wheel_count), dt, all);
}

std::vector<BenchRecord> run_benchmark(const BenchOptions& options)
{
    if (options.repetitions < 1 || options.batch < 1)
        throw DomainError("repetitions and batch must be at least 1");
    for (int k : options.wheel_counts)
        if (k < 4 || k > 24)
            throw DomainError("benchmark wheel counts must lie in [4, 24]");

    // A single Lemke pass: the proximal refinements only sharpen agreement with the SVD forces.
    LcpContactOptions lcp_options;
    lcp_options.proximal_steps = 0;

    std::vector<ContactProblem> problems;
    for (int k : options.wheel_counts)
        problems.push_back(flat_contact_problem(k));

    // Repetitions sweep every (k, method) cell in turn so clock drift hits all cells alike.
    const std::size_t cells = problems.size();
    std::vector<std::vector<double>> svd(cells), lcp(cells);
    for (int rep = 0; rep < options.repetitions; ++rep)
        for (std::size_t c = 0; c < cells; ++c)
        {
            svd[c].push_back(time_batch(problems[c], options.batch, [](const ContactProblem& p) { return solve_forces(p); }));
            lcp[c].push_back(time_batch(problems[c], options.batch,
                                        [&](const ContactProblem& p) { return lcp_contact_forces(p, lcp_options); }));
        }

    std::vector<BenchRecord> out;
    for (std::size_t c = 0; c < cells; ++c)
    {
        out.push_back(summarize("svd", options.wheel_counts[c], svd[c]));
        out.push_back(summarize("lcp", options.wheel_counts[c], lcp[c]));
    }
    return out;
}

std::string bench_to_csv(const std::vector<BenchRecord>& records)
{
    std::map<int, std::pair<const BenchRecord*, const BenchRecord*>> rows;
    for (const BenchRecord& r : records)
        (r.method == "svd" ? rows[r.wheel_count].first : rows[r.wheel_count].second) = &r;

    std::ostringstream out;
    out << std::setprecision(8);
    out << "k,mean_svd,mean_lcp,stddev_svd,stddev_lcp\n";
    auto field = [](const BenchRecord* r, bool sd) { return r ? (sd ? r->stddev : r->mean) : std::nan(""); };
    for (const auto& [k, pair] : rows)
        out << k << ',' << field(pair.first, false) << ',' << field(pair.second, false) << ','
            << field(pair.first, true) << ',' << field(pair.second, true) << '\n';
    return out.str();
}

std::string bench_to_json(const std::vector<BenchRecord>& records, const BenchOptions& options)
{
    nlohmann::json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["units"] = "seconds per solve";
    doc["problem"] = {{"terrain", "flat"},
                      {"layout", "two rows of ceil(k/2) wheels"},
                      {"track", kBenchTrack},
                      {"station_spacing", kBenchPitch},
                      {"mass", kBenchMass},
                      {"dt", 1e-3},
                      {"velocity", 0.0},
                      {"gaps", 0.0}};
    doc["batch"] = options.batch;
    doc["lcp"] = {{"method", "lemke"}, {"regularization", LcpContactOptions{}.regularization}, {"proximal_steps", 0}};
    nlohmann::json recs = nlohmann::json::array();
    for (const BenchRecord& r : records)
        recs.push_back({{"method", r.method},
                        {"wheel_count", r.wheel_count},
                        {"repetitions", r.repetitions},
                        {"mean", r.mean},
                        {"stddev", r.stddev}});
    doc["records"] = recs;
    return doc.dump(2);
}

} // namespace vpose
