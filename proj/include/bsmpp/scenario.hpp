#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsmpp/analytics.hpp"
#include "bsmpp/calibration.hpp"
#include "bsmpp/simulation.hpp"

namespace bsmpp {

struct MarginalSpec {
    enum class Kind { poisson, negative_binomial, mixture };
    Kind kind = Kind::poisson;
    // poisson
    double lambda = 0.0;
    // negative_binomial: either (mean, variance) or raw (shape, rate)
    bool has_mean_variance = false;
    double mean = 0.0;
    double variance = 0.0;
    double shape = 0.0;
    double rate = 0.0;
    // mixture
    std::vector<std::pair<double, double>> atoms;

    StructureDistribution to_structure(double horizon) const;
};

struct Scenario {
    std::vector<MarginalSpec> marginals;
    Matrix correlation;
    double horizon = 1.0;
    int periods = 1;
    int n_paths = 1000;
    std::uint64_t seed = 0;
    double truncation_tol = 1e-12;
    std::string output_dir = "out";
    std::vector<double> time_grid;  // optional; defaulted when empty

    int dimension() const { return static_cast<int>(marginals.size()); }
    std::vector<MixedPoissonDistribution> build_marginals() const;
};

// Parse errors carry line/field context in what().
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& scenario);

// CSV writers. All files carry a header row; numbers use '.' decimals
// regardless of locale.
void write_events_csv(const std::string& path, const PathSet& paths);
void write_counts_csv(const std::string& path, const PathSet& paths);
void write_weights_csv(const std::string& path, const CalibratedModel& model);
void write_extreme_corrs_csv(const std::string& path, const CalibratedModel& model);
void write_admissible_ranges_csv(const std::string& path,
                                 const CalibratedModel& model);
void write_curve_csv(const std::string& path, const CorrelationCurve& curve);

}  // namespace bsmpp
