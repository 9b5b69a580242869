#include "bsmpp/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsmpp {

namespace {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction split.
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // P(a,x) by series, return 1 - P.
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        double logp = -x + a * std::log(x) - std::lgamma(a);
        return std::max(0.0, 1.0 - sum * std::exp(logp));
    }
    // Q(a,x) by Lentz continued fraction.
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    double logp = -x + a * std::log(x) - std::lgamma(a);
    return std::exp(logp) * h;
}

// Kolmogorov asymptotic survival function with the finite-n correction.
double ks_p_value(double d_stat, std::size_t n) {
    double sqrt_n = std::sqrt(static_cast<double>(n));
    double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d_stat;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double variance_at(const MixedPoissonDistribution& m, double t) {
    double lbar = m.structure().mean_intensity();
    double s2 = m.structure().intensity_variance();
    return lbar * t + s2 * t * t;
}

}  // namespace

double z_function(const MixedPoissonDistribution& marginal, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("z_function: t must be > 0");
    return std::sqrt(variance_at(marginal, t)) / t;
}

double rho_bs(double t, double horizon, double rho_horizon,
              const MixedPoissonDistribution& a,
              const MixedPoissonDistribution& b) {
    if (!(t > 0.0)) throw std::invalid_argument("rho_bs: t must be > 0");
    if (!(t <= horizon)) throw std::invalid_argument("rho_bs: t must be <= horizon");
    double z_t = z_function(a, t) * z_function(b, t);
    double z_T = z_function(a, horizon) * z_function(b, horizon);
    return rho_horizon * z_T / z_t;
}

double rho_fc(long m, double tau, double horizon, double rho_horizon,
              const MixedPoissonDistribution& a,
              const MixedPoissonDistribution& b) {
    if (m < 0) throw std::invalid_argument("rho_fc: m must be >= 0");
    if (!(tau >= 0.0 && tau <= horizon))
        throw std::invalid_argument("rho_fc: tau must lie in [0, T]");
    if (m == 0) {
        if (tau == 0.0)
            throw std::invalid_argument("rho_fc: correlation undefined at t = 0");
        return rho_bs(tau, horizon, rho_horizon, a, b);
    }
    double dm = static_cast<double>(m);
    double var_a_T = variance_at(a, horizon);
    double var_b_T = variance_at(b, horizon);
    double var_a_tau = tau > 0.0 ? variance_at(a, tau) : 0.0;
    double var_b_tau = tau > 0.0 ? variance_at(b, tau) : 0.0;
    double num = rho_horizon * (dm + tau * tau / (horizon * horizon)) *
                 std::sqrt(var_a_T * var_b_T);
    double den = std::sqrt(dm * var_a_T + var_a_tau) *
                 std::sqrt(dm * var_b_T + var_b_tau);
    return num / den;
}

CorrelationCurve correlation_curve(const PathSet& paths, int k, int l,
                                   const std::vector<double>& times,
                                   double rho_horizon,
                                   const MixedPoissonDistribution& a,
                                   const MixedPoissonDistribution& b) {
    const std::size_t n = paths.paths.size();
    if (n < 2)
        throw std::invalid_argument("correlation_curve: need at least 2 paths");
    const double T = paths.period_length;

    CorrelationCurve curve;
    curve.pair = {k, l};
    curve.times = times;
    curve.n_paths = static_cast<long>(n);

    for (double t : times) {
        long m = static_cast<long>(std::floor(t / T + 1e-12));
        double tau = t - static_cast<double>(m) * T;
        if (tau < 1e-12 && m > 0) {
            m -= 1;
            tau = T;
        }
        curve.theoretical.push_back(rho_fc(m, tau, T, rho_horizon, a, b));

        double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (const auto& path : paths.paths) {
            double x = static_cast<double>(path.count_at(k, t));
            double y = static_cast<double>(path.count_at(l, t));
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        double dn = static_cast<double>(n);
        double vx = sxx / dn - (sx / dn) * (sx / dn);
        double vy = syy / dn - (sy / dn) * (sy / dn);
        double cov = sxy / dn - (sx / dn) * (sy / dn);
        if (vx <= 0.0 || vy <= 0.0) {
            curve.empirical.push_back(0.0);
            curve.stderrs.push_back(0.0);
            curve.degenerate.push_back(true);
            continue;
        }
        double r = cov / std::sqrt(vx * vy);
        // Fisher-transform interval mapped back to the correlation scale.
        double z = std::atanh(std::clamp(r, -0.999999, 0.999999));
        double se_z = 1.0 / std::sqrt(dn - 3.0);
        double se_r = (std::tanh(z + se_z) - std::tanh(z - se_z)) / 2.0;
        curve.empirical.push_back(r);
        curve.stderrs.push_back(se_r);
        curve.degenerate.push_back(false);
    }
    return curve;
}

double ks_uniform(std::span<const double> samples) {
    if (samples.size() < 20)
        throw std::invalid_argument("ks_uniform: need at least 20 samples");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    double n = static_cast<double>(s.size());
    double d_stat = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double cdf = std::clamp(s[i], 0.0, 1.0);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d_stat = std::max({d_stat, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    return ks_p_value(d_stat, s.size());
}

double chi_square_pmf(std::span<const long> samples, const TruncatedPmf& pmf) {
    if (samples.size() < 20)
        throw std::invalid_argument("chi_square_pmf: need at least 20 samples");
    const double n = static_cast<double>(samples.size());

    // Observed frequency per count value; everything past K is tail.
    const std::size_t k_max = pmf.probs.size();
    std::vector<double> observed(k_max + 1, 0.0);
    for (long v : samples) {
        if (v < 0) throw std::invalid_argument("chi_square_pmf: negative sample");
        std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(v), k_max);
        observed[idx] += 1.0;
    }
    std::vector<double> expected(pmf.probs.begin(), pmf.probs.end());
    expected.push_back(pmf.tail_mass);
    for (double& e : expected) e *= n;

    // Pool adjacent cells until each expected count reaches 5.
    std::vector<double> obs_pooled, exp_pooled;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= 5.0) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (!exp_pooled.empty()) {
            obs_pooled.back() += o_acc;
            exp_pooled.back() += e_acc;
        } else {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
        }
    }
    if (exp_pooled.size() < 2)
        throw std::invalid_argument("chi_square_pmf: fewer than 2 cells after pooling");

    double stat = 0.0;
    for (std::size_t i = 0; i < exp_pooled.size(); ++i) {
        double diff = obs_pooled[i] - exp_pooled[i];
        stat += diff * diff / exp_pooled[i];
    }
    double dof = static_cast<double>(exp_pooled.size() - 1);
    return chi_square_sf(stat, dof);
}

double chi_square_sf(double statistic, double dof) {
    if (statistic <= 0.0) return 1.0;
    return gamma_q(dof / 2.0, statistic / 2.0);
}

}  // namespace bsmpp
