#pragma once

#include <span>
#include <vector>

#include "bsmpp/distributions.hpp"
#include "bsmpp/simulation.hpp"

namespace bsmpp {

// sigma(X_t) / t; the pair product Z(t) of the correlation time structure
// is formed by the caller.
double z_function(const MixedPoissonDistribution& marginal, double t);

// Correlation at time t in (0, T] of a backward-simulated pair calibrated
// to rho_T at the horizon: rho(t) = rho(T) * Z(T) / Z(t).
double rho_bs(double t, double horizon, double rho_horizon,
              const MixedPoissonDistribution& a,
              const MixedPoissonDistribution& b);

// Correlation at time m*T + tau under forward continuation:
// rho(T) (m + tau^2/T^2) sigma(X_T) sigma(Y_T)
//   / sqrt(m sigma^2(X_T) + sigma^2(X_tau)) / sqrt(m sigma^2(Y_T) + sigma^2(Y_tau)).
double rho_fc(long m, double tau, double horizon, double rho_horizon,
              const MixedPoissonDistribution& a,
              const MixedPoissonDistribution& b);

struct CorrelationCurve {
    std::pair<int, int> pair;  // coordinate indices (k, l), 0-based
    std::vector<double> times;
    std::vector<double> theoretical;
    std::vector<double> empirical;
    std::vector<double> stderrs;
    std::vector<bool> degenerate;  // zero-variance sample at this time
    long n_paths = 0;
};

// Pearson correlation of cumulative counts at each time over paths, with
// Fisher-transform standard errors; theoretical values via rho_fc.
CorrelationCurve correlation_curve(const PathSet& paths, int k, int l,
                                   const std::vector<double>& times,
                                   double rho_horizon,
                                   const MixedPoissonDistribution& a,
                                   const MixedPoissonDistribution& b);

// One-sample Kolmogorov-Smirnov test against Uniform[0,1]; asymptotic p.
double ks_uniform(std::span<const double> samples);

// Pearson chi-square of observed counts against a truncated pmf, tail
// cells pooled until expected counts reach 5.
double chi_square_pmf(std::span<const long> samples, const TruncatedPmf& pmf);

// Survival function of the chi-square distribution (regularized upper
// incomplete gamma), exposed for the validation harness.
double chi_square_sf(double statistic, double dof);

}  // namespace bsmpp
