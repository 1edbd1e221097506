#include "gauss_counter/ml_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "gauss_counter/error.hpp"
#include "gauss_counter/forward_engine.hpp"
#include "gauss_counter/parallel.hpp"

namespace gauss_counter {

namespace {

constexpr double infeasible = std::numeric_limits<double>::infinity();
// Stand-in for +infinity inside the simplex search, which rejects non-finite
// values.
constexpr double penalty = 1e100;
constexpr double neighbour_gap = 1e-6;
constexpr double pi_value = 3.14159265358979323846;

struct VectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
using GslVector = std::unique_ptr<gsl_vector, VectorDeleter>;
using GslMinimizer = std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter>;

double fraction(double u) { return 0.5 * (1.0 - std::cos(u)); }

double unfraction(double s) { return std::acos(1.0 - 2.0 * std::clamp(s, 0.0, 1.0)); }

class Parameterization {
public:
    explicit Parameterization(const FitConfig& config) : config_(config)
    {
        for (std::size_t k = 0; k < config.structure.displaced.size(); ++k) {
            if (config.structure.displaced[k]) {
                displaced_.push_back(k);
            }
        }
    }

    std::size_t eigen_count() const { return config_.structure.multiplicities.size(); }
    std::size_t dimension() const { return eigen_count() + displaced_.size(); }

    NormalParameters decode(const std::vector<double>& x) const
    {
        const std::size_t h = eigen_count();
        NormalParameters np;
        np.multiplicities = config_.structure.multiplicities;
        np.eigenvalues.assign(h, 0.0);
        np.displacement_norms.assign(h, 0.0);
        const double hi = config_.lambda_max;
        for (std::size_t i = h; i-- > 0;) {
            const double a = i + 1 == h ? config_.lambda_min
                                        : std::min(hi, np.eigenvalues[i + 1] * (1.0 + neighbour_gap));
            np.eigenvalues[i] = a + (hi - a) * fraction(x[i]);
        }
        for (std::size_t j = 0; j < displaced_.size(); ++j) {
            np.displacement_norms[displaced_[j]] = config_.c_max * fraction(x[h + j]);
        }
        return np;
    }

    std::vector<double> encode(const NormalParameters& np) const
    {
        const std::size_t h = eigen_count();
        std::vector<double> x(dimension(), 0.0);
        const double hi = config_.lambda_max;
        double below = 0.0;
        for (std::size_t i = h; i-- > 0;) {
            const double a = i + 1 == h ? config_.lambda_min
                                        : std::min(hi, below * (1.0 + neighbour_gap));
            const double lambda = std::clamp(np.eigenvalues[i], a, hi);
            x[i] = hi > a ? unfraction((lambda - a) / (hi - a)) : 0.0;
            below = a + (hi - a) * fraction(x[i]);
        }
        for (std::size_t j = 0; j < displaced_.size(); ++j) {
            x[h + j] = unfraction(np.displacement_norms[displaced_[j]] / config_.c_max);
        }
        return x;
    }

private:
    const FitConfig& config_;
    std::vector<std::size_t> displaced_;
};

int likelihood_range(const SampleRun& run, const FitConfig& config)
{
    if (config.max_photons >= 0) {
        return config.max_photons;
    }
    const int observed = run.counts.empty() ? 0 : run.counts.rbegin()->first;
    return std::max(8 * config.mode_count, observed);
}

struct Objective {
    const SampleRun& run;
    const FitConfig& config;
    const Parameterization& param;
    double scale;
};

double objective_callback(const gsl_vector* v, void* data)
{
    const auto& obj = *static_cast<const Objective*>(data);
    std::vector<double> x(v->size);
    for (std::size_t i = 0; i < v->size; ++i) {
        x[i] = gsl_vector_get(v, i);
    }
    const double nll = negative_log_likelihood(obj.param.decode(x), obj.run, obj.config);
    return std::isfinite(nll) ? nll / obj.scale : penalty;
}

std::optional<NormalParameters> inversion_seed(const SampleRun& run, const FitConfig& config)
{
    const int s = config.mode_count;
    try {
        const auto empirical = empirical_distribution(run, 8 * s);
        const auto report = invert_distribution(empirical, config.inverse_options);
        NormalParameters np = report.parameters;
        if (np.multiplicities != config.structure.multiplicities) {
            return std::nullopt;
        }
        const double eta = run.efficiency;
        for (std::size_t k = 0; k < np.size(); ++k) {
            np.eigenvalues[k] = (np.eigenvalues[k] - 1.0 + eta) / eta;
            np.displacement_norms[k] =
                config.structure.displaced[k] ? np.displacement_norms[k] / std::sqrt(eta) : 0.0;
        }
        return np;
    } catch (const Error&) {
        return std::nullopt;
    }
}

RestartTrace run_restart(const SampleRun& run, const FitConfig& config,
                         const Parameterization& param, int index,
                         const std::optional<NormalParameters>& seeded)
{
    const std::size_t dim = param.dimension();
    std::vector<double> start;
    RestartTrace trace;
    trace.index = index;
    if (seeded) {
        start = param.encode(*seeded);
        trace.from_inversion = true;
    } else {
        std::mt19937_64 rng(shard_seed(config.seed, static_cast<std::uint64_t>(index)));
        std::uniform_real_distribution<double> angle(0.0, pi_value);
        for (int attempt = 0; attempt < 100; ++attempt) {
            start.assign(dim, 0.0);
            for (double& u : start) {
                u = angle(rng);
            }
            if (std::isfinite(negative_log_likelihood(param.decode(start), run, config))) {
                break;
            }
        }
    }
    trace.start = param.decode(start);

    Objective objective{run, config, param, static_cast<double>(run.sample_count)};
    gsl_multimin_function function{&objective_callback, dim, &objective};
    GslVector x(gsl_vector_alloc(dim));
    GslVector step(gsl_vector_alloc(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        gsl_vector_set(x.get(), i, start[i]);
        gsl_vector_set(step.get(), i, 0.3);
    }
    GslMinimizer minimizer(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));
    if (gsl_multimin_fminimizer_set(minimizer.get(), &function, x.get(), step.get()) != GSL_SUCCESS) {
        throw Error(ErrorCode::NumericalInstability, "simplex initialization failed");
    }
    for (trace.iterations = 0; trace.iterations < config.max_iterations; ++trace.iterations) {
        if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) {
            break;
        }
        const double size = gsl_multimin_fminimizer_size(minimizer.get());
        if (gsl_multimin_test_size(size, config.simplex_tolerance) == GSL_SUCCESS) {
            trace.converged = true;
            break;
        }
    }
    std::vector<double> best(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        best[i] = gsl_vector_get(gsl_multimin_fminimizer_x(minimizer.get()), i);
    }
    trace.result = param.decode(best);
    trace.negative_log_likelihood = negative_log_likelihood(trace.result, run, config);
    return trace;
}

}  // namespace

void validate_fit_config(const FitConfig& config)
{
    const auto& st = config.structure;
    if (config.mode_count < 1) {
        throw Error(ErrorCode::InvalidArgument, "mode count must be positive");
    }
    if (st.multiplicities.empty() || st.displaced.size() != st.multiplicities.size()) {
        throw Error(ErrorCode::StructureMismatch,
                    "structure needs one multiplicity and one displacement flag per eigenvalue");
    }
    int total = 0;
    for (int m : st.multiplicities) {
        if (m < 1) {
            throw Error(ErrorCode::StructureMismatch, "multiplicities must be positive");
        }
        total += m;
    }
    if (total != 2 * config.mode_count) {
        throw Error(ErrorCode::StructureMismatch,
                    "multiplicities sum to " + std::to_string(total) + " instead of "
                        + std::to_string(2 * config.mode_count));
    }
    if (!(std::isfinite(config.lambda_min) && std::isfinite(config.lambda_max)
          && config.lambda_min > 0.0 && config.lambda_max > config.lambda_min)) {
        throw Error(ErrorCode::InvalidArgument, "need finite 0 < lambda_min < lambda_max");
    }
    if (!(std::isfinite(config.c_max) && config.c_max > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "c_max must be finite and positive");
    }
    if (config.restarts < 1 || config.max_iterations < 1) {
        throw Error(ErrorCode::InvalidArgument, "restarts and max_iterations must be positive");
    }
}

double negative_log_likelihood(const NormalParameters& np, const SampleRun& run,
                               const FitConfig& config)
{
    try {
        validate_normal_parameters(np);
        if (np.mode_count() != run.mode_count) {
            return infeasible;
        }
        if (config.physical_only && !is_physical_spectrum(np)) {
            return infeasible;
        }
        const NormalParameters model =
            run.efficiency < 1.0 ? apply_uniform_loss(np, run.efficiency) : np;
        const int max_photons = likelihood_range(run, config);
        const auto p =
            forward_distribution<double>(model, max_photons, ForwardMethod::generating_function);

        CompensatedSum<double> mass;
        for (double x : p.probabilities) {
            if (!(x >= 0.0)) {
                return infeasible;
            }
            mass += x;
        }
        double overflow = 1.0 - mass.value();
        if (overflow < 0.0) {
            if (overflow < -1e-12) {
                return infeasible;
            }
            overflow = 0.0;
        }

        CompensatedSum<double> nll;
        for (const auto& [n, count] : run.counts) {
            const double prob = n <= max_photons ? p.probabilities[static_cast<std::size_t>(n)] : -1.0;
            if (prob < 0.0) {
                continue;  // overflow bin, handled below
            }
            if (prob == 0.0) {
                return infeasible;
            }
            nll += -static_cast<double>(count) * std::log(prob);
        }
        std::uint64_t over_count = 0;
        for (auto it = run.counts.upper_bound(max_photons); it != run.counts.end(); ++it) {
            over_count += it->second;
        }
        if (over_count > 0) {
            if (overflow <= 0.0) {
                return infeasible;
            }
            nll += -static_cast<double>(over_count) * std::log(overflow);
        }
        return nll.value();
    } catch (const Error&) {
        return infeasible;
    }
}

double multinomial_entropy_bound(const SampleRun& run, const FitConfig& config)
{
    const int max_photons = likelihood_range(run, config);
    const double total = static_cast<double>(run.sample_count);
    CompensatedSum<double> bound;
    std::uint64_t over_count = 0;
    for (const auto& [n, count] : run.counts) {
        if (n > max_photons) {
            over_count += count;
        } else if (count > 0) {
            const double k = static_cast<double>(count);
            bound += -k * std::log(k / total);
        }
    }
    if (over_count > 0) {
        const double k = static_cast<double>(over_count);
        bound += -k * std::log(k / total);
    }
    return bound.value();
}

FitResult fit(const SampleRun& run, const FitConfig& config)
{
    validate_fit_config(config);
    if (run.mode_count != config.mode_count) {
        throw Error(ErrorCode::StructureMismatch, "run and hypothesis disagree on the mode count");
    }
    if (run.sample_count == 0 || run.counts.empty()) {
        throw Error(ErrorCode::EmptyRun, "sample run has no samples");
    }
    gsl_set_error_handler_off();

    const Parameterization param(config);
    const std::optional<NormalParameters> seeded =
        config.seed_from_inversion ? inversion_seed(run, config) : std::nullopt;

    std::vector<RestartTrace> traces(static_cast<std::size_t>(config.restarts));
    parallel_for(traces.size(), [&](std::size_t i) {
        const bool use_seed = i == 0 && seeded.has_value();
        traces[i] = run_restart(run, config, param, static_cast<int>(i),
                                use_seed ? seeded : std::nullopt);
    });

    FitResult result;
    std::size_t best = 0;
    double best_nll = infeasible;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (traces[i].negative_log_likelihood < best_nll) {
            best_nll = traces[i].negative_log_likelihood;
            best = i;
        }
        result.best_so_far.push_back(best_nll);
    }
    result.parameters = traces[best].result;
    result.negative_log_likelihood = traces[best].negative_log_likelihood;
    result.converged = traces[best].converged && std::isfinite(best_nll);
    result.restarts = std::move(traces);
    return result;
}

}  // namespace gauss_counter
