#include "bsmpp/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bsmpp {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kWeightZeroTol = 1e-12;
constexpr double kResidualTol = 1e-7;
constexpr double kPivotTol = 1e-11;

}  // namespace

std::vector<double> flatten(const Matrix& c) {
    const int d = static_cast<int>(c.size());
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(c[i].size()) != d)
            throw std::invalid_argument("flatten: matrix is not square");
        if (std::abs(c[i][i] - 1.0) > kSymmetryTol)
            throw std::invalid_argument("flatten: diagonal must be 1");
        for (int j = 0; j < d; ++j)
            if (std::abs(c[i][j] - c[j][i]) > kSymmetryTol)
                throw std::invalid_argument("flatten: matrix is not symmetric");
    }
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) v.push_back(c[i][j]);
    return v;
}

Matrix unflatten(const std::vector<double>& v, int d) {
    if (static_cast<int>(v.size()) != d * (d - 1) / 2)
        throw std::invalid_argument("unflatten: length does not match dimension");
    Matrix c(d, std::vector<double>(d, 1.0));
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            c[i][j] = v[idx];
            c[j][i] = v[idx];
            ++idx;
        }
    return c;
}

PhaseOneResult phase1_solve(const Matrix& ahat, const std::vector<double>& bhat,
                            double feas_tol) {
    const int rows = static_cast<int>(ahat.size());
    if (rows == 0 || static_cast<int>(bhat.size()) != rows)
        throw std::invalid_argument("phase1_solve: shape mismatch");
    const int n = static_cast<int>(ahat[0].size());
    const int total = n + rows;  // structural + artificial columns

    // Tableau rows: constraints scaled so the RHS is nonnegative, i.e. each
    // artificial column becomes +1 on its own row. Objective: sum of
    // artificial variables, expressed in terms of nonbasic columns.
    std::vector<std::vector<double>> tab(rows, std::vector<double>(total + 1, 0.0));
    for (int i = 0; i < rows; ++i) {
        double sign = bhat[i] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) tab[i][j] = sign * ahat[i][j];
        tab[i][n + i] = 1.0;
        tab[i][total] = sign * bhat[i];
    }
    std::vector<int> basis(rows);
    for (int i = 0; i < rows; ++i) basis[i] = n + i;

    // Reduced costs for objective 1'z with z basic.
    std::vector<double> cost(total + 1, 0.0);
    for (int j = 0; j < total; ++j) {
        double s = 0.0;
        for (int i = 0; i < rows; ++i) s += tab[i][j];
        cost[j] = (j >= n ? 1.0 : 0.0) - s;
    }
    double obj = 0.0;
    for (int i = 0; i < rows; ++i) obj += tab[i][total];

    const long max_iters = 50L * (rows + total);
    for (long iter = 0; iter < max_iters; ++iter) {
        // Bland: entering column is the lowest index with negative reduced cost.
        int enter = -1;
        for (int j = 0; j < total; ++j) {
            if (cost[j] < -kPivotTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;
        // Ratio test, ties broken by lowest basis index (Bland).
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < rows; ++i) {
            if (tab[i][enter] <= kPivotTol) continue;
            double ratio = tab[i][total] / tab[i][enter];
            if (ratio < best_ratio - kPivotTol ||
                (ratio < best_ratio + kPivotTol &&
                 (leave < 0 || basis[i] < basis[leave]))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave < 0) break;  // unbounded; cannot happen with z >= 0 objective
        // Pivot.
        double piv = tab[leave][enter];
        for (int j = 0; j <= total; ++j) tab[leave][j] /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == leave) continue;
            double f = tab[i][enter];
            if (f == 0.0) continue;
            for (int j = 0; j <= total; ++j) tab[i][j] -= f * tab[leave][j];
        }
        double f = cost[enter];
        for (int j = 0; j <= total; ++j) cost[j] -= f * tab[leave][j];
        obj -= f * tab[leave][total];
        basis[leave] = enter;
    }

    obj = 0.0;
    for (int i = 0; i < rows; ++i)
        if (basis[i] >= n) obj += tab[i][total];

    PhaseOneResult result;
    result.objective = obj;
    if (obj > feas_tol) return result;

    result.feasible = true;
    result.weights.assign(n, 0.0);
    for (int i = 0; i < rows; ++i)
        if (basis[i] < n) result.weights[basis[i]] = std::max(0.0, tab[i][total]);
    return result;
}

std::pair<double, double> admissible_range(const TruncatedPmf& a,
                                           const TruncatedPmf& b) {
    std::vector<TruncatedPmf> marginals{a, b};
    MonotonicityStructure como{{0, 0}};
    MonotonicityStructure anti{{0, 1}};
    auto m_max = build_extreme_measure(marginals, como);
    auto m_min = build_extreme_measure(marginals, anti);
    double c_max = correlation_matrix(m_max, marginals)[0][1];
    double c_min = correlation_matrix(m_min, marginals)[0][1];
    return {c_min, c_max};
}

CalibrationOutcome calibrate(const std::vector<MixedPoissonDistribution>& marginals,
                             const Matrix& target, double truncation_tol) {
    const int d = static_cast<int>(marginals.size());
    if (d < 2) throw std::invalid_argument("calibrate: need at least 2 marginals");
    std::vector<double> b = flatten(target);  // validates shape and symmetry

    CalibrationOutcome outcome;

    std::vector<TruncatedPmf> truncated;
    truncated.reserve(d);
    for (const auto& m : marginals) truncated.push_back(m.truncate(truncation_tol));

    // Pairwise admissibility short-circuit with a named offending pair.
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            auto [lo, hi] = admissible_range(truncated[k], truncated[l]);
            double c = target[k][l];
            if (c < lo - kResidualTol || c > hi + kResidualTol) {
                std::ostringstream msg;
                msg << "INFEASIBLE: target correlation " << c << " for pair ("
                    << k + 1 << "," << l + 1 << ") outside admissible range ["
                    << lo << ", " << hi << "]";
                outcome.diagnostic = msg.str();
                return outcome;
            }
        }
    }

    auto structures = enumerate_structures(d);
    const int n = static_cast<int>(structures.size());
    const int m = d * (d - 1) / 2;

    std::vector<ExtremeMeasure> measures;
    measures.reserve(n);
    Matrix ahat(m + 1, std::vector<double>(n, 1.0));
    for (int j = 0; j < n; ++j) {
        measures.push_back(build_extreme_measure(truncated, structures[j]));
        auto col = flatten(correlation_matrix(measures[j], truncated));
        for (int i = 0; i < m; ++i) ahat[i][j] = col[i];
    }
    std::vector<double> bhat = b;
    bhat.push_back(1.0);

    auto lp = phase1_solve(ahat, bhat);
    if (!lp.feasible) {
        // Report the worst-violated constraint row of the residual system.
        std::ostringstream msg;
        msg << "INFEASIBLE: phase-1 objective " << lp.objective
            << " exceeds feasibility tolerance; no joint distribution with the "
               "given marginals and correlation matrix exists";
        outcome.diagnostic = msg.str();
        return outcome;
    }

    // Zero out negligible weights and renormalize.
    std::vector<double> w = lp.weights;
    double total = 0.0;
    for (double& wj : w) {
        if (wj < kWeightZeroTol) wj = 0.0;
        total += wj;
    }
    for (double& wj : w) wj /= total;

    // Residual of the recovered system.
    double max_res = 0.0;
    int worst_row = 0;
    for (int i = 0; i < m; ++i) {
        double r = -b[i];
        for (int j = 0; j < n; ++j) r += ahat[i][j] * w[j];
        if (std::abs(r) > max_res) {
            max_res = std::abs(r);
            worst_row = i;
        }
    }
    outcome.max_residual = max_res;
    if (max_res > kResidualTol) {
        std::ostringstream msg;
        msg << "INFEASIBLE: recovered weights leave residual " << max_res
            << " on constraint row " << worst_row;
        outcome.diagnostic = msg.str();
        return outcome;
    }

    CalibratedModel model;
    model.marginals = marginals;
    model.truncated = std::move(truncated);
    model.measures = std::move(measures);
    model.weights = std::move(w);
    model.target = target;
    model.horizon = marginals[0].horizon();
    model.weight_cum.resize(model.weights.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
        acc += model.weights[j];
        model.weight_cum[j] = acc;
    }
    outcome.model = std::move(model);
    return outcome;
}

const std::vector<long>& sample_joint(const CalibratedModel& model, double u_mix,
                                      double u_measure) {
    auto it = std::upper_bound(model.weight_cum.begin(), model.weight_cum.end(),
                               u_mix);
    std::size_t j = static_cast<std::size_t>(it - model.weight_cum.begin());
    if (j >= model.measures.size()) j = model.measures.size() - 1;
    return sample(model.measures[j], u_measure);
}

}  // namespace bsmpp
