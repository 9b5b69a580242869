#pragma once

#include <cstdint>
#include <vector>

#include "bsmpp/distributions.hpp"

namespace bsmpp {

// Pairwise extremal dependency pattern relative to coordinate 1.
// bits[i] == 0: comonotone with coordinate 1; bits[i] == 1: antimonotone.
// bits[0] is fixed at 0.
struct MonotonicityStructure {
    std::vector<std::uint8_t> bits;

    int dimension() const { return static_cast<int>(bits.size()); }
};

// All 2^(d-1) structures in lexicographic order.
std::vector<MonotonicityStructure> enumerate_structures(int d);

// Joint distribution on Z_+^d with the given marginals attaining the
// extremal dependence encoded by its monotonicity structure. The support is
// a monotone path, so the measure is sampleable by inverse CDF.
struct ExtremeMeasure {
    std::vector<std::vector<long>> support;  // support[k] is a d-vector
    std::vector<double> probs;
    std::vector<double> cum;  // running partial sums of probs
    MonotonicityStructure structure;
    double tail_mass = 0.0;

    int dimension() const { return structure.dimension(); }
};

ExtremeMeasure build_extreme_measure(const std::vector<TruncatedPmf>& marginals,
                                     const MonotonicityStructure& e);

// E[X_k X_l] over the support (0-based coordinate indices).
double cross_moment(const ExtremeMeasure& measure, int k, int l);

// Exact d x d correlation matrix of the measure, computed from the support.
std::vector<std::vector<double>> correlation_matrix(
    const ExtremeMeasure& measure, const std::vector<TruncatedPmf>& marginals);

// Inverse-CDF draw: support point at the first cumulative mass exceeding u.
// u at or beyond the total mass maps to the last support point.
const std::vector<long>& sample(const ExtremeMeasure& measure, double u);

}  // namespace bsmpp
