#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "bsmpp/analytics.hpp"
#include "bsmpp/calibration.hpp"
#include "bsmpp/distributions.hpp"
#include "bsmpp/ejd.hpp"
#include "bsmpp/rng.hpp"
#include "bsmpp/simulation.hpp"

namespace py = pybind11;
using namespace bsmpp;

namespace {

MixedPoissonDistribution make_poisson(double lambda, double horizon) {
    return MixedPoissonDistribution(StructureDistribution::degenerate(lambda),
                                    horizon);
}

MixedPoissonDistribution make_negative_binomial(double mean, double variance,
                                                double horizon) {
    return MixedPoissonDistribution(nb_from_mean_variance(mean, variance, horizon),
                                    horizon);
}

MixedPoissonDistribution make_mixture(
    const std::vector<std::pair<double, double>>& atoms, double horizon) {
    return MixedPoissonDistribution(StructureDistribution::finite_discrete(atoms),
                                    horizon);
}

CalibratedModel calibrate_or_raise(
    const std::vector<MixedPoissonDistribution>& marginals, const Matrix& target,
    double truncation_tol) {
    auto outcome = calibrate(marginals, target, truncation_tol);
    if (!outcome.feasible()) throw std::domain_error(outcome.diagnostic);
    return *outcome.model;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Correlated mixed Poisson processes by backward simulation";

    py::class_<MixedPoissonDistribution>(m, "MixedPoissonDistribution")
        .def_property_readonly("horizon", &MixedPoissonDistribution::horizon)
        .def_property_readonly("mean", &MixedPoissonDistribution::mean)
        .def_property_readonly("variance", &MixedPoissonDistribution::variance)
        .def("pmf", &MixedPoissonDistribution::pmf, py::arg("k"))
        .def("cdf", &MixedPoissonDistribution::cdf, py::arg("k"))
        .def("quantile", &MixedPoissonDistribution::quantile, py::arg("u"))
        .def("pgf", &MixedPoissonDistribution::pgf, py::arg("z"))
        .def("truncate", &MixedPoissonDistribution::truncate,
             py::arg("tol") = 1e-12);

    py::class_<TruncatedPmf>(m, "TruncatedPmf")
        .def_readonly("probs", &TruncatedPmf::probs)
        .def_readonly("tail_mass", &TruncatedPmf::tail_mass)
        .def_property_readonly("mean", &TruncatedPmf::mean)
        .def_property_readonly("variance", &TruncatedPmf::variance);

    py::class_<MonotonicityStructure>(m, "MonotonicityStructure")
        .def_readonly("bits", &MonotonicityStructure::bits);

    py::class_<ExtremeMeasure>(m, "ExtremeMeasure")
        .def_readonly("support", &ExtremeMeasure::support)
        .def_readonly("probs", &ExtremeMeasure::probs)
        .def_readonly("tail_mass", &ExtremeMeasure::tail_mass)
        .def_readonly("structure", &ExtremeMeasure::structure);

    py::class_<CalibratedModel>(m, "CalibratedModel")
        .def_readonly("weights", &CalibratedModel::weights)
        .def_readonly("target", &CalibratedModel::target)
        .def_readonly("horizon", &CalibratedModel::horizon)
        .def_readonly("measures", &CalibratedModel::measures)
        .def_property_readonly("dimension", &CalibratedModel::dimension);

    py::class_<Path>(m, "Path")
        .def_readonly("arrivals", &Path::arrivals)
        .def_readonly("period_counts", &Path::period_counts)
        .def("count_at", &Path::count_at, py::arg("coordinate"), py::arg("t"));

    py::class_<PathSet>(m, "PathSet")
        .def_readonly("dimension", &PathSet::dimension)
        .def_readonly("period_length", &PathSet::period_length)
        .def_readonly("periods", &PathSet::periods)
        .def_readonly("paths", &PathSet::paths);

    py::class_<CorrelationCurve>(m, "CorrelationCurve")
        .def_readonly("times", &CorrelationCurve::times)
        .def_readonly("theoretical", &CorrelationCurve::theoretical)
        .def_readonly("empirical", &CorrelationCurve::empirical)
        .def_readonly("stderrs", &CorrelationCurve::stderrs)
        .def_readonly("n_paths", &CorrelationCurve::n_paths);

    m.def("poisson", &make_poisson, py::arg("lam"), py::arg("horizon") = 1.0);
    m.def("negative_binomial", &make_negative_binomial, py::arg("mean"),
          py::arg("variance"), py::arg("horizon") = 1.0);
    m.def("mixture", &make_mixture, py::arg("atoms"), py::arg("horizon") = 1.0);
    m.def("thin_pmf", &thin_pmf, py::arg("pmf"), py::arg("x"));

    m.def("enumerate_structures", &enumerate_structures, py::arg("d"));
    m.def("build_extreme_measure", &build_extreme_measure, py::arg("marginals"),
          py::arg("structure"));
    m.def("correlation_matrix", &correlation_matrix, py::arg("measure"),
          py::arg("marginals"));
    m.def("admissible_range", &admissible_range, py::arg("a"), py::arg("b"));

    m.def("calibrate", &calibrate_or_raise, py::arg("marginals"), py::arg("target"),
          py::arg("truncation_tol") = 1e-12,
          "Solve for mixture weights; raises ValueError when the target "
          "correlation matrix is not attainable with the given marginals.");

    m.def(
        "simulate",
        [](const CalibratedModel& model, int periods, int n_paths,
           std::uint64_t seed, int threads) {
            SimulationConfig config;
            config.periods = periods;
            config.n_paths = n_paths;
            config.seed = seed;
            config.threads = threads;
            return simulate(model, config);
        },
        py::arg("model"), py::arg("periods") = 1, py::arg("paths") = 1000,
        py::arg("seed") = 0, py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

    m.def("z_function", &z_function, py::arg("marginal"), py::arg("t"));
    m.def("rho_bs", &rho_bs, py::arg("t"), py::arg("horizon"),
          py::arg("rho_horizon"), py::arg("a"), py::arg("b"));
    m.def("rho_fc", &rho_fc, py::arg("m"), py::arg("tau"), py::arg("horizon"),
          py::arg("rho_horizon"), py::arg("a"), py::arg("b"));
    m.def("correlation_curve", &correlation_curve, py::arg("paths"), py::arg("k"),
          py::arg("l"), py::arg("times"), py::arg("rho_horizon"), py::arg("a"),
          py::arg("b"));
    m.def(
        "ks_uniform",
        [](const std::vector<double>& samples) { return ks_uniform(samples); },
        py::arg("samples"));
    m.def(
        "chi_square_pmf",
        [](const std::vector<long>& samples, const TruncatedPmf& pmf) {
            return chi_square_pmf(samples, pmf);
        },
        py::arg("samples"), py::arg("pmf"));
}
