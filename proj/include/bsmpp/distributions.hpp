#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace bsmpp {

// Mixing law of the random intensity. Degenerate gives an ordinary Poisson
// process, Gamma gives a Negative Binomial process, FiniteDiscrete is a
// finite mixture of Poissons.
struct DegenerateStructure {
    double lambda;
};

struct GammaStructure {
    double shape;  // r > 0
    double rate;   // b > 0
};

struct FiniteDiscreteStructure {
    std::vector<std::pair<double, double>> atoms;  // (intensity, weight)
};

class StructureDistribution {
  public:
    using Variant =
        std::variant<DegenerateStructure, GammaStructure, FiniteDiscreteStructure>;

    static StructureDistribution degenerate(double lambda);
    static StructureDistribution gamma(double shape, double rate);
    static StructureDistribution finite_discrete(
        std::vector<std::pair<double, double>> atoms);

    double mean_intensity() const;      // E[lambda]
    double intensity_variance() const;  // Var(lambda)

    const Variant& variant() const { return v_; }
    bool is_degenerate() const;

  private:
    explicit StructureDistribution(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// Finite prefix of a count distribution, indices 0..K, with the dropped
// upper tail carried explicitly so normalization stays checkable.
struct TruncatedPmf {
    std::vector<double> probs;
    double tail_mass = 0.0;

    std::size_t size() const { return probs.size(); }
    double total_mass() const { return 1.0 - tail_mass; }
    double mean() const;
    double variance() const;
    std::vector<double> cdf() const;
};

// Count law of a mixed Poisson process at a fixed horizon.
class MixedPoissonDistribution {
  public:
    MixedPoissonDistribution(StructureDistribution structure, double horizon);

    const StructureDistribution& structure() const { return structure_; }
    double horizon() const { return horizon_; }

    double mean() const;
    double variance() const;

    double pmf(long k) const;
    double cdf(long k) const;
    long quantile(double u) const;

    // Probability generating function E[z^X], |z| <= 1.
    double pgf(double z) const;

    TruncatedPmf truncate(double tol = 1e-12) const;

  private:
    StructureDistribution structure_;
    double horizon_;
};

// Gamma structure whose mixed Poisson law at horizon T has the given mean
// and variance. Requires strict overdispersion (variance > mean).
StructureDistribution nb_from_mean_variance(double mean, double variance, double horizon);

// Binomial thinning with retention probability x: q_k = sum_m p_{k+m}
// C(k+m,k) x^k (1-x)^m. The generating function satisfies
// q(z) = p(1 - x + x z).
TruncatedPmf thin_pmf(const TruncatedPmf& p, double x);

}  // namespace bsmpp
