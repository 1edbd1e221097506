#include "gauss_counter/forward_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gauss_counter/error.hpp"
#include "gauss_counter/log.hpp"
#include "gauss_counter/moment_pipeline.hpp"
#include "gauss_counter/projector_kernel.hpp"

namespace gauss_counter {

namespace {

constexpr double clamp_tolerance = 1e-12;
constexpr double normalization_slack = 1e-9;

template <typename T>
std::vector<T> chain_relative(const NormalParameters& np, int max_photons)
{
    const auto f = f_from_parameters(to_modified<T>(np), max_photons);
    return scaled_moments_to_relative(f_to_scaled_moments(f), np.mode_count());
}

// Coefficients of log G(z) - log p0 summed over eigen-coordinates, then the
// exponential series g with n g_n = sum_k k a_k g_(n-k).
template <typename T>
std::vector<T> generating_function_relative(const NormalParameters& np, int max_photons)
{
    const std::size_t n_max = static_cast<std::size_t>(max_photons);
    std::vector<T> a(n_max + 1, T(0));
    for (std::size_t k = 0; k < np.size(); ++k) {
        const T lambda(np.eigenvalues[k]);
        const T c(np.displacement_norms[k]);
        const T beta = (lambda - T(1)) / (lambda + T(1));
        const T half_m = T(np.multiplicities[k]) / T(2);
        const T shift = T(2) * c * c / ((T(1) + lambda) * (T(1) + lambda));
        T power(1);  // beta^(n-1)
        for (std::size_t n = 1; n <= n_max; ++n) {
            a[n] += half_m * power * beta / T(static_cast<int>(n)) + shift * power;
            power *= beta;
        }
    }
    std::vector<T> g(n_max + 1);
    g[0] = T(1);
    for (std::size_t n = 1; n <= n_max; ++n) {
        CompensatedSum<T> acc;
        for (std::size_t k = 1; k <= n; ++k) {
            acc += T(static_cast<int>(k)) * a[k] * g[n - k];
        }
        g[n] = acc.value() / T(static_cast<int>(n));
    }
    g.erase(g.begin());
    return g;
}

template <typename T>
void check_distribution(std::vector<T>& p)
{
    std::size_t clamped = 0;
    T worst(0);
    CompensatedSum<T> total;
    for (std::size_t n = 0; n < p.size(); ++n) {
        if (p[n] < T(0)) {
            if (p[n] < T(-clamp_tolerance)) {
                std::ostringstream msg;
                msg << "p_" << n << " = " << to_double(p[n])
                    << " is negative beyond tolerance; the photon range is too large for this "
                       "precision";
                throw Error(ErrorCode::NumericalInstability, msg.str());
            }
            worst = std::min(worst, p[n]);
            p[n] = T(0);
            ++clamped;
        }
        total += p[n];
    }
    if (total.value() > T(1 + normalization_slack)) {
        throw Error(ErrorCode::NumericalInstability,
                    "probabilities sum to " + to_decimal(to_double(total.value())));
    }
    if (clamped > 0) {
        std::ostringstream msg;
        msg << "clamped " << clamped << " negative probabilities to zero (most negative "
            << to_double(worst) << ")";
        warn(msg.str());
    }
}

}  // namespace

template <typename T>
std::vector<T> f_from_parameters(const ModifiedNormalParameters<T>& mp, int n_max)
{
    if (n_max < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_max must be positive");
    }
    const std::size_t n_count = static_cast<std::size_t>(n_max);
    std::vector<CompensatedSum<T>> sums(n_count);
    for (std::size_t k = 0; k < mp.size(); ++k) {
        const T& lp = mp.lambda_prime[k];
        const T half_m = T(mp.multiplicities[k]) / T(2);
        T power = lp;  // lambda'^n
        for (std::size_t n = 1; n <= n_count; ++n) {
            sums[n - 1] += half_m * power + T(static_cast<int>(n)) * mp.c_prime[k] * power * lp;
            power *= lp;
        }
    }
    std::vector<T> f;
    f.reserve(n_count);
    for (const auto& s : sums) {
        f.push_back(s.value());
    }
    return f;
}

template <typename T>
T p0_from_parameters(const NormalParameters& np)
{
    using std::exp;
    using std::log;
    validate_normal_parameters(np);
    T log_p0(0);
    for (std::size_t k = 0; k < np.size(); ++k) {
        const T lambda(np.eigenvalues[k]);
        const T c(np.displacement_norms[k]);
        log_p0 += T(np.multiplicities[k]) / T(2) * log(T(2) / (lambda + T(1)));
        log_p0 -= c * c / (lambda + T(1));
    }
    return exp(log_p0);
}

PhotonNumberMoments photon_number_moments(const NormalParameters& np)
{
    validate_normal_parameters(np);
    PhotonNumberMoments out;
    const double modes = np.mode_count();
    for (std::size_t k = 0; k < np.size(); ++k) {
        const double lambda = np.eigenvalues[k];
        const double m = np.multiplicities[k];
        const double c2 = np.displacement_norms[k] * np.displacement_norms[k];
        out.mean += m * lambda / 4.0 + c2 / 2.0;
        out.variance += m * lambda * lambda / 8.0 + c2 * lambda / 2.0;
    }
    out.mean -= modes / 2.0;
    out.variance -= modes / 4.0;
    return out;
}

int tail_photon_bound(const NormalParameters& np)
{
    const auto moments = photon_number_moments(np);
    const double sd = std::sqrt(std::max(0.0, moments.variance));
    const double bound = std::ceil(std::max(0.0, moments.mean) + 10.0 * sd);
    int n = std::max(8 * np.mode_count(), static_cast<int>(bound));
    if (!is_physical_spectrum(np)) {
        return n;
    }
    // Ten standard deviations are not enough for geometric-like tails.
    const double p0 = p0_from_parameters<double>(np);
    while (n < max_tail_photons) {
        double mass = 1.0;
        for (double r : generating_function_relative<double>(np, n)) {
            mass += r;
        }
        if (1.0 - p0 * mass <= tail_mass_target) {
            break;
        }
        n = std::min(max_tail_photons, n + n / 2 + 1);
    }
    return n;
}

template <typename T>
PhotonDistribution<T> forward_distribution(const NormalParameters& np, int max_photons,
                                           ForwardMethod method)
{
    validate_normal_parameters(np);
    if (max_photons < 1) {
        throw Error(ErrorCode::InvalidArgument, "max photon number must be positive");
    }
    const std::vector<T> relative = method == ForwardMethod::cumulant_chain
                                        ? chain_relative<T>(np, max_photons)
                                        : generating_function_relative<T>(np, max_photons);
    const T p0 = p0_from_parameters<T>(np);

    PhotonDistribution<T> out;
    out.mode_count = np.mode_count();
    out.probabilities.reserve(relative.size() + 1);
    out.probabilities.push_back(p0);
    for (const T& r : relative) {
        out.probabilities.push_back(p0 * r);
    }
    for (std::size_t n = 0; n < out.probabilities.size(); ++n) {
        if (!is_finite(out.probabilities[n])) {
            throw Error(ErrorCode::NumericalInstability,
                        "p_" + std::to_string(n) + " is not finite");
        }
    }
    if (is_physical_spectrum(np)) {
        check_distribution(out.probabilities);
    }
    return out;
}

template <typename T>
PhotonDistribution<T> forward_from_spec(const GaussianStateSpec& spec, int max_photons,
                                        ForwardMethod method, double tol_distinct)
{
    return forward_distribution<T>(extract_normal_parameters(spec, tol_distinct), max_photons,
                                   method);
}

#define GAUSS_COUNTER_INSTANTIATE(T)                                                              \
    template std::vector<T> f_from_parameters<T>(const ModifiedNormalParameters<T>&, int);        \
    template T p0_from_parameters<T>(const NormalParameters&);                                    \
    template PhotonDistribution<T> forward_distribution<T>(const NormalParameters&, int,          \
                                                           ForwardMethod);                        \
    template PhotonDistribution<T> forward_from_spec<T>(const GaussianStateSpec&, int,            \
                                                        ForwardMethod, double);

GAUSS_COUNTER_INSTANTIATE(double)
GAUSS_COUNTER_INSTANTIATE(Real)

#undef GAUSS_COUNTER_INSTANTIATE

}  // namespace gauss_counter
