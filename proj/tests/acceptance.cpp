// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not configurable.

#include <stdexcept>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bsmpp/analytics.hpp"
#include "bsmpp/calibration.hpp"
#include "bsmpp/distributions.hpp"
#include "bsmpp/ejd.hpp"
#include "bsmpp/rng.hpp"
#include "bsmpp/scenario.hpp"
#include "bsmpp/simulation.hpp"
#include "lp_oracle.hpp"

using namespace bsmpp;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
    std::printf("%s  criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

MixedPoissonDistribution poisson(double lambda, double t = 1.0) {
    return MixedPoissonDistribution(StructureDistribution::degenerate(lambda), t);
}

MixedPoissonDistribution nb_mv(double mean, double var, double t = 1.0) {
    return MixedPoissonDistribution(nb_from_mean_variance(mean, var, t), t);
}

CalibratedModel must_calibrate(std::vector<MixedPoissonDistribution> marginals,
                               double rho) {
    auto outcome = calibrate(marginals, Matrix{{1.0, rho}, {rho, 1.0}});
    if (!outcome.feasible())
        throw std::runtime_error("acceptance: calibration unexpectedly infeasible: " +
                                 outcome.diagnostic);
    return *outcome.model;
}

struct PairMoments {
    double mean_x = 0, mean_y = 0, var_x = 0, var_y = 0, cov = 0;
};

PairMoments pair_moments_at(const PathSet& paths, double t) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const double n = static_cast<double>(paths.paths.size());
    for (const auto& path : paths.paths) {
        double x = static_cast<double>(path.count_at(0, t));
        double y = static_cast<double>(path.count_at(1, t));
        sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
    }
    PairMoments m;
    m.mean_x = sx / n;
    m.mean_y = sy / n;
    m.var_x = sxx / n - m.mean_x * m.mean_x;
    m.var_y = syy / n - m.mean_y * m.mean_y;
    m.cov = sxy / n - m.mean_x * m.mean_y;
    return m;
}

double empirical_rho_at(const PathSet& paths, double t) {
    auto m = pair_moments_at(paths, t);
    return m.cov / std::sqrt(m.var_x * m.var_y);
}

// --- criterion 1: multi-period correlation structure -----------------------

void criterion_1() {
    auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::ostringstream detail;
    double worst_grid = 0.0, worst_mid = 0.0;

    for (double rho : {0.7, -0.7}) {
        std::vector<MixedPoissonDistribution> marginals{nb_mv(5.0, 30.0),
                                                        poisson(5.0)};
        auto model = must_calibrate(marginals, rho);
        SimulationConfig config{7, 100000, 20240301, 0};
        auto paths = simulate(model, config);

        for (int m = 1; m <= 7; ++m) {
            double emp = empirical_rho_at(paths, static_cast<double>(m) - 1e-12);
            worst_grid = std::max(worst_grid, std::abs(emp - rho));
            pass = pass && std::abs(emp - rho) <= 0.02;
        }
        for (int m = 0; m < 7; ++m) {
            double t = m + 0.5;
            double emp = empirical_rho_at(paths, t);
            double theory = rho_fc(m, 0.5, 1.0, rho, marginals[0], marginals[1]);
            worst_mid = std::max(worst_mid, std::abs(emp - theory));
            pass = pass && std::abs(emp - theory) <= 0.03;
        }
    }

    // Single-interval NB pair: empirical curve tracks the closed form.
    double worst_nb = 0.0;
    for (double rho : {0.7, -0.7}) {
        std::vector<MixedPoissonDistribution> marginals{nb_mv(3.0, 30.0),
                                                        nb_mv(30.0, 35.0)};
        auto model = must_calibrate(marginals, rho);
        SimulationConfig config{1, 100000, 20240302, 0};
        auto paths = simulate(model, config);
        for (double t : {0.2, 0.4, 0.6, 0.8, 1.0 - 1e-12}) {
            double emp = empirical_rho_at(paths, t);
            double theory = rho_bs(std::min(t, 1.0), 1.0, rho, marginals[0],
                                   marginals[1]);
            worst_nb = std::max(worst_nb, std::abs(emp - theory));
            pass = pass && std::abs(emp - theory) <= 0.03;
        }
    }

    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    pass = pass && elapsed <= 120.0;
    detail << "max |emp-target| grid=" << worst_grid << " (tol 0.02), mid-period="
           << worst_mid << " (tol 0.03), nb-pair=" << worst_nb
           << " (tol 0.03), runtime=" << elapsed << "s (limit 120)";
    report(1, "multi-period correlation reproduction", pass, detail.str());
}

// --- criterion 2: Poisson linearity ----------------------------------------

void criterion_2() {
    std::vector<MixedPoissonDistribution> marginals{poisson(3.0), poisson(30.0)};
    const double rho = 0.7, T = 1.0;
    double worst_analytic = 0.0;
    for (int i = 1; i <= 100; ++i) {
        double t = T * i / 100.0;
        worst_analytic = std::max(
            worst_analytic,
            std::abs(rho_bs(t, T, rho, marginals[0], marginals[1]) - rho * t / T));
    }

    auto model = must_calibrate(marginals, rho);
    SimulationConfig config{1, 100000, 20240303, 0};
    auto paths = simulate(model, config);
    double worst_mc = 0.0;
    for (double t : {0.1, 0.25, 0.5, 0.75, 1.0 - 1e-12}) {
        double emp = empirical_rho_at(paths, t);
        worst_mc = std::max(worst_mc, std::abs(emp - rho * std::min(t, 1.0)));
    }

    bool pass = worst_analytic <= 1e-12 && worst_mc <= 0.02;
    std::ostringstream detail;
    detail << "max analytic deviation=" << worst_analytic
           << " (tol 1e-12), max MC deviation=" << worst_mc << " (tol 0.02)";
    report(2, "Poisson correlation linear in time", pass, detail.str());
}

// --- criterion 3: forward coupling bound -----------------------------------

void criterion_3() {
    const double l1 = 8.0, l2 = 2.0, kappa = l1 / l2;
    const int n = 100000;
    RngStream rng(31337);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    bool identity = true;
    for (int i = 0; i < n; ++i) {
        auto path = forward_comonotone(l1, l2, 1.0, rng,
                                       CouplingMode::max_dependence);
        double x = static_cast<double>(BivariatePath::count_at(path.arrivals1, 1.0));
        double y = static_cast<double>(BivariatePath::count_at(path.arrivals2, 1.0));
        sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
        for (double t : {0.25, 0.5, 0.75, 1.0}) {
            if (BivariatePath::count_at(path.arrivals1, t) !=
                BivariatePath::count_at(path.arrivals2, kappa * t)) {
                identity = false;
            }
        }
    }
    double vx = sxx / n - (sx / n) * (sx / n);
    double vy = syy / n - (sy / n) * (sy / n);
    double rho = (sxy / n - (sx / n) * (sy / n)) / std::sqrt(vx * vy);
    double expected = 1.0 / std::sqrt(kappa);
    bool pass = std::abs(rho - expected) <= 0.02 && identity;
    std::ostringstream detail;
    detail << "rho=" << rho << " expected=" << expected
           << " (tol 0.02), time-change identity "
           << (identity ? "exact" : "VIOLATED");
    report(3, "extremal forward coupling", pass, detail.str());
}

// --- criterion 4: closed form vs transportation LP -------------------------

void criterion_4() {
    auto start = std::chrono::steady_clock::now();
    RngStream rng(4242);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        auto random_pmf = [&](int atoms) {
            TruncatedPmf p;
            p.probs.resize(atoms);
            double total = 0.0;
            for (double& v : p.probs) {
                v = 0.02 + rng.next_double();
                total += v;
            }
            for (double& v : p.probs) v /= total;
            p.tail_mass = 0.0;
            return p;
        };
        auto q1 = random_pmf(2 + static_cast<int>(rng.next_u64() % 7));
        auto q2 = random_pmf(2 + static_cast<int>(rng.next_u64() % 7));
        auto como = build_extreme_measure({q1, q2}, MonotonicityStructure{{0, 0}});
        auto anti = build_extreme_measure({q1, q2}, MonotonicityStructure{{0, 1}});
        worst = std::max(
            worst, std::abs(cross_moment(como, 0, 1) -
                            lp_oracle::extreme_cross_moment(q1.probs, q2.probs, true)));
        worst = std::max(
            worst, std::abs(cross_moment(anti, 0, 1) -
                            lp_oracle::extreme_cross_moment(q1.probs, q2.probs, false)));
    }
    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    bool pass = worst <= 1e-9 && elapsed <= 10.0;
    std::ostringstream detail;
    detail << "max |closed-form - LP| = " << worst << " (tol 1e-9), runtime="
           << elapsed << "s (limit 10)";
    report(4, "extreme measure vs transportation LP", pass, detail.str());
}

// --- criterion 5: calibration exactness ------------------------------------

void criterion_5() {
    RngStream rng(555);
    bool pass = true;
    double worst_res = 0.0, worst_sum = 0.0;

    for (int d : {2, 3, 4}) {
        std::vector<MixedPoissonDistribution> marginals;
        for (int k = 0; k < d; ++k)
            marginals.push_back(k % 2 == 0 ? poisson(2.0 + k)
                                           : nb_mv(3.0 + k, 10.0 + 4 * k));
        std::vector<TruncatedPmf> truncated;
        for (const auto& m : marginals) truncated.push_back(m.truncate(1e-12));

        auto structures = enumerate_structures(d);
        std::vector<std::vector<double>> columns;
        for (const auto& e : structures)
            columns.push_back(flatten(
                correlation_matrix(build_extreme_measure(truncated, e), truncated)));

        for (int trial = 0; trial < 5; ++trial) {
            // Random simplex weights define a feasible target.
            std::vector<double> w_star(structures.size());
            double total = 0.0;
            for (double& w : w_star) {
                w = rng.next_double();
                total += w;
            }
            for (double& w : w_star) w /= total;
            std::vector<double> b(d * (d - 1) / 2, 0.0);
            for (std::size_t j = 0; j < columns.size(); ++j)
                for (std::size_t i = 0; i < b.size(); ++i)
                    b[i] += w_star[j] * columns[j][i];

            auto outcome = calibrate(marginals, unflatten(b, d));
            if (!outcome.feasible()) {
                pass = false;
                continue;
            }
            const auto& model = *outcome.model;
            double sum_w = std::accumulate(model.weights.begin(),
                                           model.weights.end(), 0.0);
            worst_sum = std::max(worst_sum, std::abs(sum_w - 1.0));
            worst_res = std::max(worst_res, outcome.max_residual);
            for (double w : model.weights) pass = pass && w >= 0.0;
        }

        // Outside the pairwise admissible range: must report INFEASIBLE.
        auto [lo, hi] = admissible_range(truncated[0], truncated[1]);
        Matrix bad(d, std::vector<double>(d, 0.0));
        for (int i = 0; i < d; ++i) bad[i][i] = 1.0;
        bad[0][1] = bad[1][0] = hi + 0.05;
        pass = pass && !calibrate(marginals, bad).feasible();
    }

    pass = pass && worst_res <= 1e-7 && worst_sum <= 1e-9;
    std::ostringstream detail;
    detail << "max residual=" << worst_res << " (tol 1e-7), max |sum w - 1|="
           << worst_sum << " (tol 1e-9), infeasible targets rejected";
    report(5, "calibration exactness d=2..4", pass, detail.str());
}

// --- criterion 6: distributional correctness of backward simulation --------

void criterion_6() {
    std::vector<MixedPoissonDistribution> marginals{nb_mv(5.0, 30.0), poisson(5.0)};
    auto model = must_calibrate(marginals, 0.7);

    int ks_passes = 0, chi_passes = 0;
    for (int seed = 1; seed <= 10; ++seed) {
        SimulationConfig config{1, 5000, static_cast<std::uint64_t>(seed), 0};
        auto paths = simulate(model, config);
        std::vector<double> pooled;
        for (const auto& path : paths.paths)
            for (const auto& arrivals : path.arrivals)
                for (double t : arrivals) pooled.push_back(t);
        if (ks_uniform(pooled) > 0.01) ++ks_passes;

        bool chi_ok = true;
        for (int j = 0; j < 2; ++j) {
            std::vector<long> counts;
            for (const auto& path : paths.paths)
                counts.push_back(path.period_counts[j][0]);
            chi_ok = chi_ok && chi_square_pmf(counts, model.truncated[j]) > 0.01;
        }
        if (chi_ok) ++chi_passes;
    }

    // Cross-period independence on a longer run.
    SimulationConfig config{4, 20000, 777, 0};
    auto paths = simulate(model, config);
    const double n = static_cast<double>(paths.paths.size());
    bool cov_ok = true;
    double worst_cov_z = 0.0;
    for (int j = 0; j < 2; ++j) {
        double var_T = model.marginals[j].variance();
        double s0 = 0, s1 = 0, s01 = 0;
        for (const auto& path : paths.paths) {
            double a = static_cast<double>(path.period_counts[j][0]);
            double b = static_cast<double>(path.period_counts[j][3]);
            s0 += a; s1 += b; s01 += a * b;
        }
        double cov = s01 / n - (s0 / n) * (s1 / n);
        double se = var_T / std::sqrt(n);
        worst_cov_z = std::max(worst_cov_z, std::abs(cov) / se);
        cov_ok = cov_ok && std::abs(cov) <= 3.0 * se;
    }

    bool pass = ks_passes >= 9 && chi_passes >= 9 && cov_ok;
    std::ostringstream detail;
    detail << "KS seeds passed " << ks_passes << "/10 (need 9), chi-square "
           << chi_passes << "/10 (need 9), max cross-period cov z-score="
           << worst_cov_z << " (limit 3)";
    report(6, "backward simulation distributional checks", pass, detail.str());
}

// --- criterion 7: thinning identity ----------------------------------------

void criterion_7() {
    double worst_mgf = 0.0;
    for (const auto& dist : {poisson(3.0), MixedPoissonDistribution(
                                               StructureDistribution::gamma(1.0, 0.2),
                                               1.0)}) {
        auto p = dist.truncate(1e-13);
        auto pgf_of = [](const TruncatedPmf& pmf, double z) {
            double s = 0.0, zk = 1.0;
            for (double pk : pmf.probs) {
                s += pk * zk;
                zk *= z;
            }
            return s;
        };
        for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            auto q = thin_pmf(p, x);
            for (double z : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
                worst_mgf = std::max(
                    worst_mgf, std::abs(pgf_of(q, z) - pgf_of(p, 1.0 - x + x * z)));
            }
        }
    }

    // Poisson thinning reproduces the shorter-horizon Poisson pmf.
    const double lambda = 3.0, T = 1.0, t = 0.4;
    auto p = poisson(lambda, T).truncate(1e-13);
    auto q = thin_pmf(p, t / T);
    auto expect = poisson(lambda, t);
    double worst_pmf = 0.0;
    for (std::size_t k = 0; k < q.probs.size(); ++k)
        worst_pmf = std::max(worst_pmf, std::abs(q.probs[k] - expect.pmf(k)));

    bool pass = worst_mgf <= 1e-9 && worst_pmf <= 1e-9;
    std::ostringstream detail;
    detail << "max generating-function gap=" << worst_mgf
           << " (tol 1e-9), max pmf gap=" << worst_pmf << " (tol ~truncation)";
    report(7, "binomial thinning identities", pass, detail.str());
}

// --- criterion 8: covariance scaling ---------------------------------------

void criterion_8() {
    std::vector<MixedPoissonDistribution> marginals{nb_mv(5.0, 30.0), poisson(5.0)};
    auto model = must_calibrate(marginals, 0.7);
    SimulationConfig config{1, 100000, 88, 0};
    auto paths = simulate(model, config);

    // Ratio per batch; batch-mean standard error.
    const int batches = 20;
    const int per = static_cast<int>(paths.paths.size()) / batches;
    std::vector<double> ratios;
    for (int b = 0; b < batches; ++b) {
        double sxh = 0, syh = 0, sxyh = 0, sx = 0, sy = 0, sxy = 0;
        for (int i = b * per; i < (b + 1) * per; ++i) {
            const auto& path = paths.paths[i];
            double xh = static_cast<double>(path.count_at(0, 0.5));
            double yh = static_cast<double>(path.count_at(1, 0.5));
            double x = static_cast<double>(path.count_at(0, 1.0));
            double y = static_cast<double>(path.count_at(1, 1.0));
            sxh += xh; syh += yh; sxyh += xh * yh;
            sx += x; sy += y; sxy += x * y;
        }
        double cov_h = sxyh / per - (sxh / per) * (syh / per);
        double cov_T = sxy / per - (sx / per) * (sy / per);
        ratios.push_back(cov_h / cov_T);
    }
    double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / batches;
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= (batches - 1);
    double se = std::sqrt(var / batches);

    bool pass = std::abs(mean - 0.25) <= 3.0 * se;
    std::ostringstream detail;
    detail << "cov ratio at T/2 = " << mean << " expected 0.25, SE=" << se;
    report(8, "quadratic covariance scaling", pass, detail.str());
}

// --- criterion 9: determinism and throughput -------------------------------

void criterion_9() {
    std::vector<MixedPoissonDistribution> marginals{nb_mv(5.0, 30.0), poisson(5.0)};
    auto model = must_calibrate(marginals, 0.7);

    auto csv_of = [](const PathSet& paths) {
        std::string tmp = "/tmp/bsmpp_acceptance_events.csv";
        write_events_csv(tmp, paths);
        std::ifstream in(tmp, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    SimulationConfig one{2, 2000, 99, 1};
    SimulationConfig four{2, 2000, 99, 4};
    auto run1 = csv_of(simulate(model, one));
    auto run2 = csv_of(simulate(model, four));
    auto run3 = csv_of(simulate(model, one));
    bool deterministic = run1 == run2 && run1 == run3;

    const int n = 30000;
    SimulationConfig bench{1, n, 7, 1};
    auto start = std::chrono::steady_clock::now();
    auto paths = simulate(model, bench);
    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    double rate = n / elapsed;
    bool pass = deterministic && rate >= 1e4 && !paths.paths.empty();

    std::ostringstream detail;
    detail << (deterministic ? "byte-identical across runs and thread counts"
                             : "DETERMINISM VIOLATED")
           << ", single-core throughput=" << static_cast<long>(rate)
           << " paths/sec (need 1e4)";
    report(9, "determinism and throughput", pass, detail.str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures > 0) {
        std::printf("%d acceptance criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
