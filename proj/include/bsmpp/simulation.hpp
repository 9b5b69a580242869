#pragma once

#include <cstdint>
#include <vector>

#include "bsmpp/calibration.hpp"
#include "bsmpp/rng.hpp"

namespace bsmpp {

// One scenario: per-coordinate sorted arrival times plus the terminal
// increment of each period [mT, (m+1)T).
struct Path {
    std::vector<std::vector<double>> arrivals;      // [coordinate][event]
    std::vector<std::vector<long>> period_counts;   // [coordinate][period]

    // Cumulative count of coordinate k at time t.
    long count_at(int coordinate, double t) const;
};

struct PathSet {
    int dimension = 0;
    double period_length = 0.0;
    int periods = 0;
    std::vector<Path> paths;
};

struct SimulationConfig {
    int periods = 1;
    int n_paths = 1;
    std::uint64_t seed = 0;
    int threads = 0;  // 0: use available parallelism
};

// Fill one period with sorted i.i.d. uniforms per coordinate, counts[j] of
// them on [start, start + length). Streams are keyed per coordinate.
std::vector<std::vector<double>> backward_simulate_period(
    const std::vector<long>& counts, double start, double length,
    std::uint64_t seed, std::uint64_t path_index, std::uint64_t period);

// Terminal counts per period drawn from the calibrated joint law, arrivals
// filled in backward; periods are independent so increments are independent.
PathSet simulate(const CalibratedModel& model, const SimulationConfig& config);

enum class CouplingMode { max_dependence, min_dependence };

// Bivariate Poisson paths with inter-arrival times coupled through the
// extremal (co/antimonotone) relation on the exponential marginals.
// Arrivals are generated past max(1, lambda1/lambda2) * horizon on the
// second coordinate so counts at scaled times are well defined.
struct BivariatePath {
    std::vector<double> arrivals1;
    std::vector<double> arrivals2;

    static long count_at(const std::vector<double>& arrivals, double t);
};

BivariatePath forward_comonotone(double lambda1, double lambda2, double horizon,
                                 RngStream& rng, CouplingMode mode);

}  // namespace bsmpp
