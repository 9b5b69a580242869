#include "bsmpp/ejd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsmpp {

namespace {

constexpr double kAtomDropTol = 1e-14;
constexpr int kMaxDimension = 12;

}  // namespace

std::vector<MonotonicityStructure> enumerate_structures(int d) {
    if (d < 2 || d > kMaxDimension)
        throw std::invalid_argument("enumerate_structures: d must lie in [2, 12]");
    const std::size_t n = std::size_t{1} << (d - 1);
    std::vector<MonotonicityStructure> out;
    out.reserve(n);
    for (std::size_t code = 0; code < n; ++code) {
        MonotonicityStructure e;
        e.bits.assign(d, 0);
        for (int i = 1; i < d; ++i)
            e.bits[i] = static_cast<std::uint8_t>((code >> (d - 1 - i)) & 1u);
        out.push_back(std::move(e));
    }
    return out;
}

// Sweep construction. Coordinate k with e_k = 0 takes value i on the
// CDF interval [F_k(i-1), F_k(i)); with e_k = 1 it takes value i on
// [1 - F_k(i), 1 - F_k(i-1)), walking from the truncation index downward.
// Atoms are the segments between consecutive breakpoints of any coordinate;
// ties advance all tied cursors at once.
ExtremeMeasure build_extreme_measure(const std::vector<TruncatedPmf>& marginals,
                                     const MonotonicityStructure& e) {
    const int d = e.dimension();
    if (d < 2 || static_cast<int>(marginals.size()) != d)
        throw std::invalid_argument("build_extreme_measure: dimension mismatch");
    if (e.bits[0] != 0)
        throw std::invalid_argument("build_extreme_measure: e_1 must be 0");

    std::vector<std::vector<double>> cdfs;
    cdfs.reserve(d);
    for (const auto& m : marginals) cdfs.push_back(m.cdf());

    // Current value and the u-coordinate where that value's interval ends.
    std::vector<long> value(d);
    std::vector<double> upper(d);
    double u_lo = 0.0, u_hi = 1.0;
    for (int k = 0; k < d; ++k) {
        const auto& F = cdfs[k];
        double total = F.back();
        if (e.bits[k] == 0) {
            value[k] = 0;
            upper[k] = F[0];
            u_hi = std::min(u_hi, total);
        } else {
            value[k] = static_cast<long>(F.size()) - 1;
            upper[k] = value[k] > 0 ? 1.0 - F[value[k] - 1] : 1.0;
            u_lo = std::max(u_lo, 1.0 - total);
        }
    }

    ExtremeMeasure out;
    out.structure = e;
    double u = u_lo;
    double kept = 0.0;
    while (u < u_hi) {
        double next = u_hi;
        for (int k = 0; k < d; ++k) next = std::min(next, upper[k]);
        double mass = next - u;
        if (mass > kAtomDropTol) {
            out.support.emplace_back(value.begin(), value.end());
            out.probs.push_back(mass);
            kept += mass;
        }
        if (next >= u_hi) break;
        // Advance every coordinate whose interval ends here.
        for (int k = 0; k < d; ++k) {
            if (upper[k] > next) continue;
            const auto& F = cdfs[k];
            if (e.bits[k] == 0) {
                ++value[k];
                upper[k] = value[k] < static_cast<long>(F.size())
                               ? F[value[k]]
                               : u_hi;
            } else {
                --value[k];
                if (value[k] < 0) {
                    upper[k] = u_hi;  // exhausted; sweep ends at u_hi anyway
                } else {
                    upper[k] = value[k] > 0 ? 1.0 - F[value[k] - 1] : 1.0;
                }
            }
        }
        u = std::max(u, next);
    }

    out.tail_mass = std::max(0.0, 1.0 - kept);
    out.cum.resize(out.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < out.probs.size(); ++i) {
        acc += out.probs[i];
        out.cum[i] = acc;
    }
    return out;
}

double cross_moment(const ExtremeMeasure& measure, int k, int l) {
    double s = 0.0;
    for (std::size_t i = 0; i < measure.support.size(); ++i)
        s += measure.probs[i] * static_cast<double>(measure.support[i][k]) *
             static_cast<double>(measure.support[i][l]);
    return s;
}

std::vector<std::vector<double>> correlation_matrix(
    const ExtremeMeasure& measure, const std::vector<TruncatedPmf>& marginals) {
    const int d = measure.dimension();
    std::vector<double> mu(d), sigma(d);
    for (int k = 0; k < d; ++k) {
        mu[k] = marginals[k].mean();
        double v = marginals[k].variance();
        if (!(v > 0.0))
            throw std::invalid_argument("correlation_matrix: zero marginal variance");
        sigma[k] = std::sqrt(v);
    }
    std::vector<std::vector<double>> c(d, std::vector<double>(d, 1.0));
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            double rho = (cross_moment(measure, k, l) - mu[k] * mu[l]) /
                         (sigma[k] * sigma[l]);
            c[k][l] = rho;
            c[l][k] = rho;
        }
    }
    return c;
}

const std::vector<long>& sample(const ExtremeMeasure& measure, double u) {
    if (!(u >= 0.0))
        throw std::invalid_argument("sample: u must be >= 0");
    auto it = std::upper_bound(measure.cum.begin(), measure.cum.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - measure.cum.begin());
    if (idx >= measure.support.size()) idx = measure.support.size() - 1;
    return measure.support[idx];
}

}  // namespace bsmpp
