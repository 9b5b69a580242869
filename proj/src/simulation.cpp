#include "bsmpp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace bsmpp {

namespace {

// Coordinate index reserved for the joint terminal draw of a period.
constexpr std::uint64_t kJointDrawCoordinate = ~std::uint64_t{0};

}  // namespace

long Path::count_at(int coordinate, double t) const {
    const auto& a = arrivals[coordinate];
    return static_cast<long>(std::upper_bound(a.begin(), a.end(), t) - a.begin());
}

std::vector<std::vector<double>> backward_simulate_period(
    const std::vector<long>& counts, double start, double length,
    std::uint64_t seed, std::uint64_t path_index, std::uint64_t period) {
    std::vector<std::vector<double>> arrivals(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] < 0)
            throw std::invalid_argument("backward_simulate_period: negative count");
        if (counts[j] == 0) continue;
        auto rng = RngStream::substream(seed, path_index, period, j);
        auto& a = arrivals[j];
        a.reserve(counts[j]);
        for (long i = 0; i < counts[j]; ++i)
            a.push_back(start + length * rng.next_double());
        std::sort(a.begin(), a.end());
    }
    return arrivals;
}

PathSet simulate(const CalibratedModel& model, const SimulationConfig& config) {
    if (config.periods < 1 || config.n_paths < 1)
        throw std::invalid_argument("simulate: periods and n_paths must be >= 1");
    const int d = model.dimension();
    const double T = model.horizon;

    PathSet out;
    out.dimension = d;
    out.period_length = T;
    out.periods = config.periods;
    out.paths.resize(config.n_paths);

    auto run_path = [&](int p) {
        Path& path = out.paths[p];
        path.arrivals.assign(d, {});
        path.period_counts.assign(d, std::vector<long>(config.periods, 0));
        for (int m = 0; m < config.periods; ++m) {
            auto joint_rng = RngStream::substream(config.seed, p, m,
                                                  kJointDrawCoordinate);
            double u_mix = joint_rng.next_double();
            double u_measure = joint_rng.next_double();
            const auto& counts = sample_joint(model, u_mix, u_measure);
            auto arrivals = backward_simulate_period(counts, m * T, T,
                                                     config.seed, p, m);
            for (int j = 0; j < d; ++j) {
                path.period_counts[j][m] = counts[j];
                auto& dest = path.arrivals[j];
                dest.insert(dest.end(), arrivals[j].begin(), arrivals[j].end());
            }
        }
    };

    int threads = config.threads;
    if (threads <= 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<int>(threads, config.n_paths);

    if (threads == 1) {
        for (int p = 0; p < config.n_paths; ++p) run_path(p);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(threads);
        for (int w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                for (int p = w; p < config.n_paths; p += threads) run_path(p);
            });
        }
        for (auto& t : workers) t.join();
    }
    return out;
}

long BivariatePath::count_at(const std::vector<double>& arrivals, double t) {
    return static_cast<long>(
        std::upper_bound(arrivals.begin(), arrivals.end(), t) - arrivals.begin());
}

BivariatePath forward_comonotone(double lambda1, double lambda2, double horizon,
                                 RngStream& rng, CouplingMode mode) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
        throw std::invalid_argument("forward_comonotone: intensities must be > 0");
    if (!(horizon > 0.0))
        throw std::invalid_argument("forward_comonotone: horizon must be > 0");

    const double kappa = lambda1 / lambda2;
    const double stop1 = horizon;
    const double stop2 = std::max(horizon, kappa * horizon);

    BivariatePath path;
    double t1 = 0.0, t2 = 0.0;
    while (t1 <= stop1 || t2 <= stop2) {
        double u = rng.next_double();
        double dt1 = -std::log1p(-u) / lambda1;
        double dt2;
        if (mode == CouplingMode::max_dependence) {
            // lambda1 dT1 = lambda2 dT2
            dt2 = kappa * dt1;
        } else {
            // exp(-lambda1 dT1) + exp(-lambda2 dT2) = 1
            double s = -std::expm1(-lambda1 * dt1);  // 1 - exp(-l1 dt1)
            dt2 = -std::log(s) / lambda2;
        }
        t1 += dt1;
        t2 += dt2;
        if (t1 <= stop1) path.arrivals1.push_back(t1);
        if (t2 <= stop2) path.arrivals2.push_back(t2);
        if (t1 > stop1 && t2 > stop2) break;
    }
    return path;
}

}  // namespace bsmpp
