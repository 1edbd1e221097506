#include "gauss_counter/serialization.hpp"

#include <cmath>
#include <string>

namespace gauss_counter {

namespace {

// Infinite or NaN diagnostics become null rather than invalid JSON.
Json number(double x)
{
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

Json numbers(const std::vector<double>& v)
{
    Json out = Json::array();
    for (double x : v) {
        out.push_back(number(x));
    }
    return out;
}

Json real_numbers(const std::vector<Real>& v)
{
    Json out = Json::array();
    for (const Real& x : v) {
        out.push_back(number(to_double(x)));
    }
    return out;
}

Json decimals(const std::vector<Real>& v)
{
    Json out = Json::array();
    for (const Real& x : v) {
        out.push_back(to_decimal(x));
    }
    return out;
}

void check_schema(const Json& j)
{
    if (!j.is_object()) {
        throw Error(ErrorCode::ParseError, "expected a JSON object");
    }
    if (j.contains("schema_version") && j.at("schema_version") != Json(schema_version)) {
        throw Error(ErrorCode::ParseError, "unsupported schema_version "
                                               + j.at("schema_version").dump());
    }
}

const Json& field(const Json& j, const char* name)
{
    if (!j.contains(name)) {
        throw Error(ErrorCode::ParseError, std::string("missing field \"") + name + "\"");
    }
    return j.at(name);
}

template <typename T>
T read(const Json& j, const char* name)
{
    try {
        return field(j, name).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("field \"") + name + "\": " + e.what());
    }
}

Json to_json(const std::vector<HankelScanEntry>& scan)
{
    Json out = Json::array();
    for (const auto& e : scan) {
        out.push_back({{"degree", e.degree}, {"singular_ratio", number(e.singular_ratio)}});
    }
    return out;
}

Json to_json(const RootCluster& r)
{
    return {{"lambda_prime", number(to_double(r.lambda_prime))},
            {"lambda_prime_decimal", to_decimal(r.lambda_prime)},
            {"multiplicity", r.multiplicity},
            {"imag_ratio", number(r.imag_ratio)},
            {"spread", number(r.spread)},
            {"residual", number(r.residual)}};
}

Json to_json(const RestartTrace& t)
{
    return {{"index", t.index},
            {"from_inversion", t.from_inversion},
            {"start", to_json(t.start)},
            {"result", to_json(t.result)},
            {"negative_log_likelihood", number(t.negative_log_likelihood)},
            {"iterations", t.iterations},
            {"converged", t.converged}};
}

}  // namespace

std::string_view library_version() noexcept
{
    return "0.1.0";
}

Json with_envelope(Json body)
{
    body["schema_version"] = schema_version;
    body["version"] = std::string(library_version());
    return body;
}

Json to_json(const GaussianStateSpec& spec)
{
    Json cov = Json::array();
    for (Eigen::Index r = 0; r < spec.covariance.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < spec.covariance.cols(); ++c) {
            row.push_back(spec.covariance(r, c));
        }
        cov.push_back(std::move(row));
    }
    Json disp = Json::array();
    for (Eigen::Index i = 0; i < spec.displacement.size(); ++i) {
        disp.push_back(spec.displacement(i));
    }
    return {{"mode_count", spec.mode_count}, {"covariance", cov}, {"displacement", disp}};
}

Json to_json(const NormalParameters& np)
{
    return {{"eigenvalues", numbers(np.eigenvalues)},
            {"multiplicities", np.multiplicities},
            {"displacement_norms", numbers(np.displacement_norms)}};
}

Json to_json(const CanonicalParameters& cp)
{
    return {{"thermal", numbers(cp.thermal)}, {"squeezing", numbers(cp.squeezing)}};
}

Json to_json(const ValidationReport& report)
{
    return {{"symmetry_defect", number(report.symmetry_defect)},
            {"min_eigenvalue", number(report.min_eigenvalue)},
            {"min_symplectic_eigenvalue", number(report.min_symplectic_eigenvalue)},
            {"symmetric", report.symmetric},
            {"positive_definite", report.positive_definite},
            {"physical", report.physical},
            {"passed", report.passed}};
}

Json to_json(const PhotonDistribution<double>& p)
{
    Json out{{"mode_count", p.mode_count},
             {"max_photons", p.max_photons()},
             {"probabilities", numbers(p.probabilities)}};
    if (p.sample_count) {
        out["sample_count"] = *p.sample_count;
    }
    return out;
}

Json to_json(const PhotonDistribution<Real>& p)
{
    Json out{{"mode_count", p.mode_count},
             {"max_photons", p.max_photons()},
             {"probabilities", real_numbers(p.probabilities)},
             {"probabilities_decimal", decimals(p.probabilities)}};
    if (p.sample_count) {
        out["sample_count"] = *p.sample_count;
    }
    return out;
}

Json to_json(const ProjectorPolynomial<double>& poly)
{
    return {{"mode_count", poly.mode_count},
            {"photon_number", poly.photon_number},
            {"coefficients", numbers(poly.coefficients)}};
}

Json to_json(const SampleRun& run)
{
    Json counts = Json::object();
    for (const auto& [n, count] : run.counts) {
        counts[std::to_string(n)] = count;
    }
    return {{"mode_count", run.mode_count},
            {"seed", run.seed},
            {"sample_count", run.sample_count},
            {"efficiency", run.efficiency},
            {"counts", counts}};
}

Json to_json(const InversionReport& report)
{
    Json roots = Json::array();
    for (const auto& r : report.roots) {
        roots.push_back(to_json(r));
    }
    Json out{{"mode_count", report.mode_count},
             {"hankel_scan", to_json(report.hankel_scan)},
             {"polynomial", {{"degree", report.polynomial.degree()},
                             {"coefficients", real_numbers(report.polynomial.coefficients)}}},
             {"annihilation_residual", number(report.annihilation_residual)},
             {"roots", roots},
             {"weight_residual", number(report.weight_residual)},
             {"multiplicities_raw", numbers(report.multiplicities_raw)},
             {"rounding_deltas", numbers(report.rounding_deltas)},
             {"clustering_candidates", report.clustering_candidates}};
    if (!report.parameters.eigenvalues.empty()) {
        out["parameters"] = to_json(report.parameters);
    }
    return out;
}

Json to_json(const FitResult& result)
{
    Json restarts = Json::array();
    for (const auto& t : result.restarts) {
        restarts.push_back(to_json(t));
    }
    return {{"parameters", to_json(result.parameters)},
            {"negative_log_likelihood", number(result.negative_log_likelihood)},
            {"converged", result.converged},
            {"best_so_far", numbers(result.best_so_far)},
            {"restarts", restarts}};
}

Json to_json(const MonteCarloEstimate& estimate)
{
    return {{"estimate", number(estimate.estimate)},
            {"standard_error", number(estimate.standard_error)}};
}

Json to_json(const Error& error)
{
    Json out{{"error", std::string(to_string(error.code()))}, {"message", error.what()}};
    if (!error.stage().empty()) {
        out["stage"] = error.stage();
    }
    return out;
}

GaussianStateSpec state_from_json(const Json& j)
{
    check_schema(j);
    GaussianStateSpec spec;
    spec.mode_count = read<int>(j, "mode_count");
    const auto rows = read<std::vector<std::vector<double>>>(j, "covariance");
    const auto disp = read<std::vector<double>>(j, "displacement");
    const auto dim = static_cast<Eigen::Index>(rows.size());
    spec.covariance.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != dim) {
            throw Error(ErrorCode::DimensionMismatch, "covariance must be square");
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            spec.covariance(r, c) = row[static_cast<std::size_t>(c)];
        }
    }
    spec.displacement = Eigen::Map<const Eigen::VectorXd>(disp.data(),
                                                          static_cast<Eigen::Index>(disp.size()));
    return spec;
}

NormalParameters normal_parameters_from_json(const Json& j)
{
    check_schema(j);
    const Json& body = j.contains("parameters") && !j.contains("eigenvalues") ? j.at("parameters") : j;
    NormalParameters np;
    np.eigenvalues = read<std::vector<double>>(body, "eigenvalues");
    np.multiplicities = read<std::vector<int>>(body, "multiplicities");
    np.displacement_norms = read<std::vector<double>>(body, "displacement_norms");
    return np;
}

PhotonDistribution<Real> distribution_from_json(const Json& j)
{
    check_schema(j);
    PhotonDistribution<Real> p;
    p.mode_count = read<int>(j, "mode_count");
    if (j.contains("probabilities_decimal")) {
        for (const auto& text : read<std::vector<std::string>>(j, "probabilities_decimal")) {
            p.probabilities.push_back(parse_real(text));
        }
    } else {
        for (double x : read<std::vector<double>>(j, "probabilities")) {
            p.probabilities.emplace_back(x);
        }
    }
    if (j.contains("sample_count")) {
        p.sample_count = read<std::uint64_t>(j, "sample_count");
    }
    return p;
}

SampleRun sample_run_from_json(const Json& j)
{
    check_schema(j);
    SampleRun run;
    run.mode_count = read<int>(j, "mode_count");
    run.seed = j.contains("seed") ? read<std::uint64_t>(j, "seed") : 0;
    run.sample_count = read<std::uint64_t>(j, "sample_count");
    run.efficiency = j.contains("efficiency") ? read<double>(j, "efficiency") : 1.0;
    const Json& counts = field(j, "counts");
    if (!counts.is_object()) {
        throw Error(ErrorCode::ParseError, "counts must map photon numbers to counts");
    }
    for (const auto& [key, value] : counts.items()) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(key, &used);
            if (used != key.size() || n < 0) {
                throw Error(ErrorCode::ParseError, "bad photon number \"" + key + "\"");
            }
            run.counts[n] = value.get<std::uint64_t>();
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::ParseError, "bad counts entry \"" + key + "\"");
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::ParseError, "bad counts entry \"" + key + "\"");
        }
    }
    return run;
}

StructureHypothesis structure_from_json(const Json& j)
{
    check_schema(j);
    StructureHypothesis st;
    st.multiplicities = read<std::vector<int>>(j, "multiplicities");
    st.displaced = read<std::vector<bool>>(j, "displaced");
    return st;
}

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

}  // namespace gauss_counter
