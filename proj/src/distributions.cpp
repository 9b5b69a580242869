#include "bsmpp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bsmpp {

namespace {

constexpr double kWeightTol = 1e-12;

double poisson_pmf(double lambda, long k) {
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    double logp = static_cast<double>(k) * std::log(lambda) - lambda -
                  std::lgamma(static_cast<double>(k) + 1.0);
    return std::exp(logp);
}

// NB pmf in log space: shape r can be fractional and k can reach hundreds
// under tight truncation.
double nb_pmf(double r, double b, double t, long k) {
    double log_success = std::log(b) - std::log(b + t);
    double log_fail = std::log(t) - std::log(b + t);
    double logp = std::lgamma(static_cast<double>(k) + r) - std::lgamma(r) -
                  std::lgamma(static_cast<double>(k) + 1.0) + r * log_success +
                  static_cast<double>(k) * log_fail;
    return std::exp(logp);
}

}  // namespace

StructureDistribution StructureDistribution::degenerate(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("degenerate structure: lambda must be > 0");
    return StructureDistribution(DegenerateStructure{lambda});
}

StructureDistribution StructureDistribution::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("gamma structure: shape and rate must be > 0");
    return StructureDistribution(GammaStructure{shape, rate});
}

StructureDistribution StructureDistribution::finite_discrete(
    std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty())
        throw std::invalid_argument("finite discrete structure: no atoms");
    double total = 0.0;
    for (const auto& [lambda, weight] : atoms) {
        if (!(lambda > 0.0))
            throw std::invalid_argument("finite discrete structure: intensity must be > 0");
        if (weight < 0.0)
            throw std::invalid_argument("finite discrete structure: negative weight");
        total += weight;
    }
    if (std::abs(total - 1.0) > kWeightTol)
        throw std::invalid_argument("finite discrete structure: weights must sum to 1");
    return StructureDistribution(FiniteDiscreteStructure{std::move(atoms)});
}

double StructureDistribution::mean_intensity() const {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DegenerateStructure>) {
                return s.lambda;
            } else if constexpr (std::is_same_v<T, GammaStructure>) {
                return s.shape / s.rate;
            } else {
                double m = 0.0;
                for (const auto& [lambda, w] : s.atoms) m += lambda * w;
                return m;
            }
        },
        v_);
}

double StructureDistribution::intensity_variance() const {
    return std::visit(
        [this](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DegenerateStructure>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, GammaStructure>) {
                return s.shape / (s.rate * s.rate);
            } else {
                double m = mean_intensity();
                double v = 0.0;
                for (const auto& [lambda, w] : s.atoms)
                    v += (lambda - m) * (lambda - m) * w;
                return v;
            }
        },
        v_);
}

bool StructureDistribution::is_degenerate() const {
    return std::holds_alternative<DegenerateStructure>(v_);
}

double TruncatedPmf::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k)
        m += static_cast<double>(k) * probs[k];
    return m;
}

double TruncatedPmf::variance() const {
    double m = mean();
    double s = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        double d = static_cast<double>(k) - m;
        s += d * d * probs[k];
    }
    return s;
}

std::vector<double> TruncatedPmf::cdf() const {
    std::vector<double> c(probs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        c[k] = acc;
    }
    return c;
}

MixedPoissonDistribution::MixedPoissonDistribution(StructureDistribution structure,
                                                   double horizon)
    : structure_(std::move(structure)), horizon_(horizon) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("mixed Poisson distribution: horizon must be > 0");
}

double MixedPoissonDistribution::mean() const {
    return structure_.mean_intensity() * horizon_;
}

double MixedPoissonDistribution::variance() const {
    return structure_.mean_intensity() * horizon_ +
           structure_.intensity_variance() * horizon_ * horizon_;
}

double MixedPoissonDistribution::pmf(long k) const {
    if (k < 0) throw std::invalid_argument("pmf: k must be >= 0");
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DegenerateStructure>) {
                return poisson_pmf(s.lambda * horizon_, k);
            } else if constexpr (std::is_same_v<T, GammaStructure>) {
                return nb_pmf(s.shape, s.rate, horizon_, k);
            } else {
                double p = 0.0;
                for (const auto& [lambda, w] : s.atoms)
                    p += w * poisson_pmf(lambda * horizon_, k);
                return p;
            }
        },
        structure_.variant());
}

double MixedPoissonDistribution::cdf(long k) const {
    if (k < 0) return 0.0;
    double acc = 0.0;
    for (long i = 0; i <= k; ++i) acc += pmf(i);
    return std::min(acc, 1.0);
}

long MixedPoissonDistribution::quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0))
        throw std::invalid_argument("quantile: u must lie in [0, 1)");
    double acc = 0.0;
    long k = 0;
    for (;;) {
        acc += pmf(k);
        if (acc > u) return k;
        ++k;
        if (k > 100000000)
            throw std::runtime_error("quantile: failed to accumulate past u");
    }
}

double MixedPoissonDistribution::pgf(double z) const {
    if (std::abs(z) > 1.0 + 1e-12)
        throw std::invalid_argument("pgf: |z| must be <= 1");
    double t = horizon_;
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DegenerateStructure>) {
                return std::exp(s.lambda * t * (z - 1.0));
            } else if constexpr (std::is_same_v<T, GammaStructure>) {
                return std::pow(s.rate / (s.rate + t * (1.0 - z)), s.shape);
            } else {
                double g = 0.0;
                for (const auto& [lambda, w] : s.atoms)
                    g += w * std::exp(lambda * t * (z - 1.0));
                return g;
            }
        },
        structure_.variant());
}

TruncatedPmf MixedPoissonDistribution::truncate(double tol) const {
    if (!(tol > 0.0 && tol < 1.0))
        throw std::invalid_argument("truncate: tol must lie in (0, 1)");
    TruncatedPmf out;
    double acc = 0.0;
    long k = 0;
    for (;;) {
        double p = pmf(k);
        out.probs.push_back(p);
        acc += p;
        if (1.0 - acc <= tol) break;
        ++k;
        if (k > 100000000)
            throw std::runtime_error("truncate: failed to reach tolerance");
    }
    out.tail_mass = std::max(0.0, 1.0 - acc);
    return out;
}

StructureDistribution nb_from_mean_variance(double mean, double variance,
                                            double horizon) {
    if (!(mean > 0.0)) throw std::invalid_argument("nb_from_mean_variance: mean must be > 0");
    if (!(horizon > 0.0))
        throw std::invalid_argument("nb_from_mean_variance: horizon must be > 0");
    if (!(variance > mean))
        throw std::invalid_argument(
            "nb_from_mean_variance: variance must strictly exceed mean "
            "(mixed Poisson counts are overdispersed; variance = mean is the "
            "Poisson limit)");
    double excess = variance - mean;
    double shape = mean * mean / excess;
    double rate = mean * horizon / excess;
    return StructureDistribution::gamma(shape, rate);
}

TruncatedPmf thin_pmf(const TruncatedPmf& p, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("thin_pmf: x must lie in [0, 1]");
    const std::size_t n = p.probs.size();
    TruncatedPmf q;
    q.probs.assign(n, 0.0);
    if (x == 1.0) {
        q.probs = p.probs;
        q.tail_mass = p.tail_mass;
        return q;
    }
    if (x == 0.0) {
        // Every event is dropped; all mass collapses onto zero counts.
        q.probs.assign(1, 1.0);
        q.tail_mass = 0.0;
        return q;
    }
    double log_x = std::log(x);
    double log_1mx = std::log1p(-x);
    for (std::size_t j = 0; j < n; ++j) {
        if (p.probs[j] == 0.0) continue;
        // Distribute p_j over k = 0..j with Binomial(j, x) weights.
        for (std::size_t k = 0; k <= j; ++k) {
            double logw = std::lgamma(static_cast<double>(j) + 1.0) -
                          std::lgamma(static_cast<double>(k) + 1.0) -
                          std::lgamma(static_cast<double>(j - k) + 1.0) +
                          static_cast<double>(k) * log_x +
                          static_cast<double>(j - k) * log_1mx;
            q.probs[k] += p.probs[j] * std::exp(logw);
        }
    }
    double total = std::accumulate(q.probs.begin(), q.probs.end(), 0.0);
    q.tail_mass = std::max(0.0, 1.0 - total);
    while (q.probs.size() > 1 && q.probs.back() == 0.0) q.probs.pop_back();
    return q;
}

}  // namespace bsmpp
