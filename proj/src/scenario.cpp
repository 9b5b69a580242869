#include "bsmpp/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bsmpp {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& field, const std::string& why) {
    throw std::runtime_error("scenario parse error: field '" + field + "': " + why);
}

double require_finite(const json& j, const std::string& field) {
    if (!j.is_number()) parse_fail(field, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) parse_fail(field, "value is not finite");
    return v;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

std::ofstream open_csv(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out.imbue(std::locale::classic());
    return out;
}

}  // namespace

StructureDistribution MarginalSpec::to_structure(double horizon) const {
    switch (kind) {
        case Kind::poisson:
            return StructureDistribution::degenerate(lambda);
        case Kind::negative_binomial:
            if (has_mean_variance)
                return nb_from_mean_variance(mean, variance, horizon);
            return StructureDistribution::gamma(shape, rate);
        case Kind::mixture:
            return StructureDistribution::finite_discrete(atoms);
    }
    throw std::logic_error("unreachable marginal kind");
}

std::vector<MixedPoissonDistribution> Scenario::build_marginals() const {
    std::vector<MixedPoissonDistribution> out;
    out.reserve(marginals.size());
    for (const auto& spec : marginals)
        out.emplace_back(spec.to_structure(horizon), horizon);
    return out;
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("scenario parse error: ") + e.what());
    }

    Scenario s;
    if (j.contains("horizon")) s.horizon = require_finite(j["horizon"], "horizon");
    if (!(s.horizon > 0.0)) parse_fail("horizon", "must be > 0");
    if (j.contains("periods")) s.periods = j["periods"].get<int>();
    if (s.periods < 1) parse_fail("periods", "must be >= 1");
    if (j.contains("paths")) s.n_paths = j["paths"].get<int>();
    if (s.n_paths < 1) parse_fail("paths", "must be >= 1");
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("truncation_tol"))
        s.truncation_tol = require_finite(j["truncation_tol"], "truncation_tol");
    if (!(s.truncation_tol > 0.0 && s.truncation_tol < 1.0))
        parse_fail("truncation_tol", "must lie in (0, 1)");
    if (j.contains("output_dir")) s.output_dir = j["output_dir"].get<std::string>();

    if (!j.contains("marginals") || !j["marginals"].is_array() ||
        j["marginals"].size() < 2)
        parse_fail("marginals", "expected an array of at least 2 marginal specs");
    for (std::size_t i = 0; i < j["marginals"].size(); ++i) {
        const auto& mj = j["marginals"][i];
        std::string field = "marginals[" + std::to_string(i) + "]";
        if (!mj.contains("type")) parse_fail(field, "missing 'type'");
        std::string type = mj["type"].get<std::string>();
        MarginalSpec spec;
        if (type == "poisson") {
            spec.kind = MarginalSpec::Kind::poisson;
            spec.lambda = require_finite(mj.at("lambda"), field + ".lambda");
        } else if (type == "negative_binomial") {
            spec.kind = MarginalSpec::Kind::negative_binomial;
            if (mj.contains("mean")) {
                spec.has_mean_variance = true;
                spec.mean = require_finite(mj.at("mean"), field + ".mean");
                spec.variance = require_finite(mj.at("variance"), field + ".variance");
            } else {
                spec.shape = require_finite(mj.at("shape"), field + ".shape");
                spec.rate = require_finite(mj.at("rate"), field + ".rate");
            }
        } else if (type == "mixture") {
            spec.kind = MarginalSpec::Kind::mixture;
            for (const auto& atom : mj.at("atoms")) {
                double lambda = require_finite(atom.at(0), field + ".atoms.lambda");
                double weight = require_finite(atom.at(1), field + ".atoms.weight");
                spec.atoms.emplace_back(lambda, weight);
            }
        } else {
            parse_fail(field, "unknown type '" + type + "'");
        }
        s.marginals.push_back(std::move(spec));
    }

    const int d = s.dimension();
    if (!j.contains("correlation") || !j["correlation"].is_array())
        parse_fail("correlation", "expected a matrix");
    if (static_cast<int>(j["correlation"].size()) != d)
        parse_fail("correlation", "dimension does not match number of marginals");
    s.correlation.assign(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(j["correlation"][i].size()) != d)
            parse_fail("correlation", "row " + std::to_string(i) + " has wrong length");
        for (int k = 0; k < d; ++k)
            s.correlation[i][k] =
                require_finite(j["correlation"][i][k],
                               "correlation[" + std::to_string(i) + "][" +
                                   std::to_string(k) + "]");
    }

    if (j.contains("time_grid"))
        for (const auto& t : j["time_grid"])
            s.time_grid.push_back(require_finite(t, "time_grid"));
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    json j;
    j["horizon"] = s.horizon;
    j["periods"] = s.periods;
    j["paths"] = s.n_paths;
    j["seed"] = s.seed;
    j["truncation_tol"] = s.truncation_tol;
    j["output_dir"] = s.output_dir;
    j["marginals"] = json::array();
    for (const auto& spec : s.marginals) {
        json mj;
        switch (spec.kind) {
            case MarginalSpec::Kind::poisson:
                mj["type"] = "poisson";
                mj["lambda"] = spec.lambda;
                break;
            case MarginalSpec::Kind::negative_binomial:
                mj["type"] = "negative_binomial";
                if (spec.has_mean_variance) {
                    mj["mean"] = spec.mean;
                    mj["variance"] = spec.variance;
                } else {
                    mj["shape"] = spec.shape;
                    mj["rate"] = spec.rate;
                }
                break;
            case MarginalSpec::Kind::mixture:
                mj["type"] = "mixture";
                mj["atoms"] = json::array();
                for (const auto& [lambda, weight] : spec.atoms)
                    mj["atoms"].push_back({lambda, weight});
                break;
        }
        j["marginals"].push_back(mj);
    }
    j["correlation"] = s.correlation;
    if (!s.time_grid.empty()) j["time_grid"] = s.time_grid;
    return j.dump(2);
}

void write_events_csv(const std::string& path, const PathSet& paths) {
    auto out = open_csv(path);
    out << "path_id,coordinate,event_time\n";
    for (std::size_t p = 0; p < paths.paths.size(); ++p)
        for (int j = 0; j < paths.dimension; ++j)
            for (double t : paths.paths[p].arrivals[j])
                out << p << ',' << j << ',' << format_double(t) << '\n';
}

void write_counts_csv(const std::string& path, const PathSet& paths) {
    auto out = open_csv(path);
    out << "path_id,coordinate,period,count\n";
    for (std::size_t p = 0; p < paths.paths.size(); ++p)
        for (int j = 0; j < paths.dimension; ++j)
            for (int m = 0; m < paths.periods; ++m)
                out << p << ',' << j << ',' << m << ','
                    << paths.paths[p].period_counts[j][m] << '\n';
}

void write_weights_csv(const std::string& path, const CalibratedModel& model) {
    auto out = open_csv(path);
    out << "structure,weight\n";
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
        std::string bits;
        for (auto b : model.measures[j].structure.bits)
            bits += b ? '1' : '0';
        out << bits << ',' << format_double(model.weights[j]) << '\n';
    }
}

void write_extreme_corrs_csv(const std::string& path, const CalibratedModel& model) {
    auto out = open_csv(path);
    out << "structure,row,col,correlation\n";
    for (std::size_t j = 0; j < model.measures.size(); ++j) {
        std::string bits;
        for (auto b : model.measures[j].structure.bits)
            bits += b ? '1' : '0';
        auto c = correlation_matrix(model.measures[j], model.truncated);
        const int d = model.dimension();
        for (int k = 0; k < d; ++k)
            for (int l = k + 1; l < d; ++l)
                out << bits << ',' << k + 1 << ',' << l + 1 << ','
                    << format_double(c[k][l]) << '\n';
    }
}

void write_admissible_ranges_csv(const std::string& path,
                                 const CalibratedModel& model) {
    auto out = open_csv(path);
    out << "row,col,c_min,c_max,target\n";
    const int d = model.dimension();
    for (int k = 0; k < d; ++k)
        for (int l = k + 1; l < d; ++l) {
            auto [lo, hi] = admissible_range(model.truncated[k], model.truncated[l]);
            out << k + 1 << ',' << l + 1 << ',' << format_double(lo) << ','
                << format_double(hi) << ',' << format_double(model.target[k][l])
                << '\n';
        }
}

void write_curve_csv(const std::string& path, const CorrelationCurve& curve) {
    auto out = open_csv(path);
    out << "time,rho_theoretical,rho_empirical,stderr,n_paths\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        out << format_double(curve.times[i]) << ','
            << format_double(curve.theoretical[i]) << ','
            << format_double(curve.empirical[i]) << ','
            << format_double(curve.stderrs[i]) << ',' << curve.n_paths << '\n';
}

}  // namespace bsmpp
