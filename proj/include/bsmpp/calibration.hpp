#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bsmpp/distributions.hpp"
#include "bsmpp/ejd.hpp"

namespace bsmpp {

using Matrix = std::vector<std::vector<double>>;

// Row-major strict upper triangle of a symmetric unit-diagonal matrix.
std::vector<double> flatten(const Matrix& c);
Matrix unflatten(const std::vector<double>& v, int d);

struct PhaseOneResult {
    bool feasible = false;
    std::vector<double> weights;  // empty when infeasible
    double objective = 0.0;       // residual artificial mass at optimum
};

// Phase-1 simplex for Ahat w = bhat, w >= 0: minimize the artificial-variable
// mass 1'z subject to Ahat w + E z = bhat with E = diag(sign bhat), starting
// from w = 0, z = |bhat|. Bland's rule guards against cycling.
PhaseOneResult phase1_solve(const Matrix& ahat, const std::vector<double>& bhat,
                            double feas_tol = 1e-9);

// Correlation interval attainable between two fixed marginals: correlations
// of the antimonotone and comonotone bivariate extreme measures.
std::pair<double, double> admissible_range(const TruncatedPmf& a,
                                           const TruncatedPmf& b);

struct CalibratedModel {
    std::vector<MixedPoissonDistribution> marginals;
    std::vector<TruncatedPmf> truncated;
    std::vector<ExtremeMeasure> measures;
    std::vector<double> weights;
    std::vector<double> weight_cum;
    Matrix target;
    double horizon = 0.0;

    int dimension() const { return static_cast<int>(marginals.size()); }
};

struct CalibrationOutcome {
    std::optional<CalibratedModel> model;
    std::string diagnostic;       // set when infeasible
    double max_residual = 0.0;    // ||Aw - b||_inf of the recovered system

    bool feasible() const { return model.has_value(); }
};

// Express the target correlation matrix as a convex mixture of the 2^(d-1)
// extreme correlation matrices and pair the weights with the corresponding
// extreme measures.
CalibrationOutcome calibrate(const std::vector<MixedPoissonDistribution>& marginals,
                             const Matrix& target, double truncation_tol = 1e-12);

// Two-stage draw: categorical over the mixture weights, then inverse-CDF on
// the selected extreme measure. u_mix and u_measure are independent uniforms.
const std::vector<long>& sample_joint(const CalibratedModel& model, double u_mix,
                                      double u_measure);

}  // namespace bsmpp
