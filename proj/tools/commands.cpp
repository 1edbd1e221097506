#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "gauss_counter/forward_engine.hpp"
#include "gauss_counter/inverse_engine.hpp"
#include "gauss_counter/log.hpp"
#include "gauss_counter/ml_estimator.hpp"
#include "gauss_counter/moment_pipeline.hpp"
#include "gauss_counter/oracle_sampler.hpp"
#include "gauss_counter/projector_kernel.hpp"
#include "gauss_counter/serialization.hpp"

namespace gauss_counter::cli {

namespace {

constexpr const char* exit_code_help =
    "Exit codes:\n"
    "  0  success\n"
    "  2  invalid input (error JSON on stderr)\n"
    "  3  numerical failure (error JSON on stderr)\n"
    "  4  roundtrip deviation above --tol\n"
    "Set GAUSS_COUNTER_THREADS to cap the number of worker threads.";

struct Io {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    std::string input = "-";
    std::string output = "-";

    Json read() const
    {
        std::string text;
        if (input == "-") {
            text.assign(std::istreambuf_iterator<char>(in), {});
        } else {
            std::ifstream file(input);
            if (!file) {
                throw Error(ErrorCode::InvalidArgument, "cannot open input file " + input);
            }
            text.assign(std::istreambuf_iterator<char>(file), {});
        }
        return parse_json(text);
    }

    void write(const Json& body) const
    {
        const std::string text = with_envelope(body).dump(2);
        if (output == "-") {
            out << text << '\n';
            return;
        }
        std::ofstream file(output);
        if (!file) {
            throw Error(ErrorCode::InvalidArgument, "cannot open output file " + output);
        }
        file << text << '\n';
    }
};

struct Tolerances {
    InverseOptions options;

    void attach(CLI::App* app)
    {
        app->add_option("--tol-rank", options.tol_rank, "Relative singular-value threshold of the rank scan")
            ->capture_default_str();
        app->add_option("--tol-root", options.tol_root, "Relative distance that merges two roots")
            ->capture_default_str();
        app->add_option("--tol-res", options.tol_res, "Bound on the relative model residuals")
            ->capture_default_str();
    }
};

// Either a state (has "covariance") or normal parameters.
NormalParameters parameters_from_input(const Json& j)
{
    if (j.is_object() && j.contains("covariance")) {
        return extract_normal_parameters(state_from_json(j));
    }
    return normal_parameters_from_json(j);
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument, "bad integer list \"" + text + "\"");
        }
    }
    return out;
}

// Every ordered composition of 2S, each eigenspace displaced.
std::vector<StructureHypothesis> all_structures(int mode_count)
{
    std::vector<StructureHypothesis> out;
    const int total = 2 * mode_count;
    for (unsigned mask = 0; mask < (1u << (total - 1)); ++mask) {
        StructureHypothesis st;
        int run = 1;
        for (int i = 0; i < total - 1; ++i) {
            if (mask & (1u << i)) {
                st.multiplicities.push_back(run);
                run = 1;
            } else {
                ++run;
            }
        }
        st.multiplicities.push_back(run);
        st.displaced.assign(st.multiplicities.size(), true);
        out.push_back(std::move(st));
    }
    return out;
}

double parameter_deviation(const NormalParameters& expected, const NormalParameters& actual)
{
    if (expected.multiplicities != actual.multiplicities) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        worst = std::max(worst, std::abs(actual.eigenvalues[k] - expected.eigenvalues[k])
                                    / expected.eigenvalues[k]);
        worst = std::max(worst, std::abs(actual.displacement_norms[k]
                                         - expected.displacement_norms[k]));
    }
    return worst;
}

int report_error(const Error& e, const Io& io, Json extra = Json::object())
{
    Json body = to_json(e);
    for (auto& [key, value] : extra.items()) {
        body[key] = value;
    }
    io.err << with_envelope(body).dump() << '\n';
    return is_validation_error(e.code()) ? exit_validation : exit_numerical;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err)
{
    CLI::App app{"Total photon-number distributions of Gaussian states: forward evaluation, "
                 "exact inversion, sampling and likelihood fitting.",
                 "gauss-counter"};
    app.footer(exit_code_help);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(library_version()));

    Io io{in, out, err};
    auto add_io = [&](CLI::App* sub) {
        sub->add_option("-i,--input", io.input, "Input JSON file, - for stdin")->capture_default_str();
        sub->add_option("-o,--output", io.output, "Output JSON file, - for stdout")->capture_default_str();
    };

    // forward
    auto* forward = app.add_subcommand("forward", "State or normal parameters -> p_0..p_N");
    add_io(forward);
    int max_photons = -1;
    std::string method = "chain";
    forward->add_option("--max-photons", max_photons, "Largest photon number (default 8S)");
    forward->add_option("--method", method, "chain (100-digit cumulant chain) or gf (double generating function)")
        ->check(CLI::IsMember({"chain", "gf"}))
        ->capture_default_str();

    // invert
    auto* invert = app.add_subcommand("invert", "p_0..p_8S -> normal parameters with diagnostics");
    add_io(invert);
    Tolerances invert_tol;
    invert_tol.attach(invert);

    // sample
    auto* sample = app.add_subcommand("sample", "Simulated photon counts for a state");
    add_io(sample);
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    double efficiency = 1.0;
    sample->add_option("--samples", samples, "Number of detection events")->capture_default_str();
    sample->add_option("--seed", seed, "Master RNG seed")->capture_default_str();
    sample->add_option("--efficiency", efficiency, "Per-photon detection probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood normal parameters from a sample run");
    add_io(fit_cmd);
    FitConfig fit_config;
    std::string multiplicities;
    std::string displaced;
    bool scan = false;
    Tolerances fit_tol;
    fit_cmd->add_option("--multiplicities", multiplicities,
                        "Comma-separated multiplicities, largest eigenvalue first (default 2S)");
    fit_cmd->add_option("--displaced", displaced,
                        "Comma-separated 0/1 flags: which displacements are free (default all)");
    fit_cmd->add_flag("--scan", scan, "Fit every multiplicity pattern and report all, best first");
    fit_cmd->add_option("--max-photons", fit_config.max_photons,
                        "Likelihood range; larger counts share one overflow bin");
    fit_cmd->add_option("--lambda-min", fit_config.lambda_min)->capture_default_str();
    fit_cmd->add_option("--lambda-max", fit_config.lambda_max)->capture_default_str();
    fit_cmd->add_option("--c-max", fit_config.c_max)->capture_default_str();
    fit_cmd->add_option("--restarts", fit_config.restarts)->capture_default_str();
    fit_cmd->add_option("--seed", fit_config.seed, "Restart RNG seed")->capture_default_str();
    fit_tol.attach(fit_cmd);

    // roundtrip
    auto* roundtrip = app.add_subcommand("roundtrip", "Forward 8S+1 probabilities, invert, compare");
    add_io(roundtrip);
    double tol = 1e-6;
    double noise = 0.0;
    std::uint64_t noise_seed = 0;
    Tolerances roundtrip_tol;
    roundtrip->add_option("--tol", tol, "Largest accepted deviation")->capture_default_str();
    roundtrip->add_option("--noise", noise, "Relative Gaussian noise added to each probability")
        ->capture_default_str();
    roundtrip->add_option("--seed", noise_seed, "Noise RNG seed")->capture_default_str();
    roundtrip_tol.attach(roundtrip);

    // debug-kernel
    auto* debug = app.add_subcommand("debug-kernel", "Projector polynomial coefficients, or moments of a distribution");
    add_io(debug);
    int debug_modes = 1;
    int debug_photons = 0;
    bool moments = false;
    debug->add_option("--modes", debug_modes, "Mode count S")->capture_default_str();
    debug->add_option("--photons", debug_photons, "Photon number n")->capture_default_str();
    debug->add_flag("--moments", moments, "Read a distribution and dump (mu, kappa, f)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    const WarningSink previous = set_warning_sink([&err](std::string_view message) {
        err << "gauss-counter: warning: " << message << '\n';
    });
    struct Restore {
        WarningSink sink;
        ~Restore() { set_warning_sink(std::move(sink)); }
    } restore{previous};

    try {
        if (forward->parsed()) {
            const NormalParameters np = parameters_from_input(io.read());
            const int n = max_photons >= 0 ? max_photons : 8 * np.mode_count();
            Json body;
            if (method == "chain") {
                body = to_json(forward_distribution<Real>(np, n, ForwardMethod::cumulant_chain));
            } else {
                body = to_json(forward_distribution<double>(np, n, ForwardMethod::generating_function));
            }
            body["parameters"] = to_json(np);
            io.write(body);
            return exit_ok;
        }

        if (invert->parsed()) {
            const auto p = distribution_from_json(io.read());
            try {
                const InversionReport report = invert_distribution(p, invert_tol.options);
                Json body = to_json(report);
                body["canonical"] = to_json(canonical_parameters(expand_spectrum(report.parameters)));
                io.write(body);
                return exit_ok;
            } catch (const InversionError& e) {
                return report_error(e, io, {{"report", to_json(e.partial_report())}});
            }
        }

        if (sample->parsed()) {
            const NormalParameters np = parameters_from_input(io.read());
            io.write(to_json(sample_counts(np, samples, efficiency, seed)));
            return exit_ok;
        }

        if (fit_cmd->parsed()) {
            const SampleRun run = sample_run_from_json(io.read());
            fit_config.mode_count = run.mode_count;
            fit_config.inverse_options = fit_tol.options;
            std::vector<StructureHypothesis> hypotheses;
            if (scan) {
                hypotheses = all_structures(run.mode_count);
            } else {
                StructureHypothesis st;
                st.multiplicities = multiplicities.empty() ? std::vector<int>{2 * run.mode_count}
                                                           : parse_int_list(multiplicities);
                if (displaced.empty()) {
                    st.displaced.assign(st.multiplicities.size(), true);
                } else {
                    for (int flag : parse_int_list(displaced)) {
                        st.displaced.push_back(flag != 0);
                    }
                }
                hypotheses.push_back(std::move(st));
            }
            std::vector<std::pair<double, Json>> fits;
            for (const auto& st : hypotheses) {
                fit_config.structure = st;
                const FitResult result = fit(run, fit_config);
                Json entry = to_json(result);
                entry["structure"] = {{"multiplicities", st.multiplicities},
                                      {"displaced", st.displaced}};
                fits.emplace_back(result.negative_log_likelihood, std::move(entry));
            }
            std::stable_sort(fits.begin(), fits.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            Json body = fits.front().second;
            body["entropy_bound"] = multinomial_entropy_bound(run, fit_config);
            if (scan) {
                Json all = Json::array();
                for (auto& f : fits) {
                    all.push_back(std::move(f.second));
                }
                body["hypotheses"] = std::move(all);
            }
            io.write(body);
            return exit_ok;
        }

        if (roundtrip->parsed()) {
            const NormalParameters np = normal_parameters_from_json(io.read());
            validate_normal_parameters(np);
            auto p = forward_distribution<Real>(np, 8 * np.mode_count());
            if (noise > 0.0) {
                std::mt19937_64 rng(noise_seed);
                std::normal_distribution<double> normal;
                for (Real& x : p.probabilities) {
                    x *= Real(1.0 + noise * normal(rng));
                }
            }
            Json body{{"input", to_json(np)}, {"tol", tol}, {"noise", noise}};
            try {
                const InversionReport report = invert_distribution(p, roundtrip_tol.options);
                const double deviation = parameter_deviation(np, report.parameters);
                body["recovered"] = to_json(report.parameters);
                body["max_deviation"] = std::isfinite(deviation) ? Json(deviation) : Json(nullptr);
                body["report"] = to_json(report);
                body["passed"] = deviation < tol;
                io.write(body);
                return deviation < tol ? exit_ok : exit_roundtrip_failed;
            } catch (const InversionError& e) {
                body["error"] = to_json(e);
                body["report"] = to_json(e.partial_report());
                body["passed"] = false;
                io.write(body);
                return exit_roundtrip_failed;
            }
        }

        if (debug->parsed()) {
            if (moments) {
                const auto p = distribution_from_json(io.read());
                const auto mu = probabilities_to_moments(p, p.max_photons());
                Json body{{"mode_count", p.mode_count},
                          {"moments", Json::array()},
                          {"cumulants", Json::array()},
                          {"f", Json::array()}};
                for (const Real& x : mu) {
                    body["moments"].push_back(to_double(x));
                }
                for (const Real& x : moments_to_cumulants(mu)) {
                    body["cumulants"].push_back(to_double(x));
                }
                for (const Real& x : moments_to_f(mu)) {
                    body["f"].push_back(to_double(x));
                }
                io.write(body);
            } else {
                io.write(to_json(projector_polynomial<double>(debug_modes, debug_photons)));
            }
            return exit_ok;
        }
    } catch (const Error& e) {
        return report_error(e, io);
    }
    return exit_validation;
}

}  // namespace gauss_counter::cli
