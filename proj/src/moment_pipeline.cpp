#include "gauss_counter/moment_pipeline.hpp"

#include <string>

#include "gauss_counter/error.hpp"
#include "gauss_counter/projector_kernel.hpp"

namespace gauss_counter {

namespace {

template <typename T>
void require_finite(const std::vector<T>& values, const char* what)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!is_finite(values[i])) {
            throw Error(ErrorCode::NonFiniteInput, std::string(what) + " entry "
                                                       + std::to_string(i + 1) + " is not finite");
        }
    }
}

}  // namespace

template <typename T>
std::vector<T> moments_to_cumulants(const std::vector<T>& mu)
{
    require_finite(mu, "moment");
    const std::size_t n = mu.size();
    const auto pascal = pascal_triangle<T>(static_cast<int>(n));
    std::vector<T> kappa(n);
    for (std::size_t m = 1; m <= n; ++m) {
        CompensatedSum<T> acc;
        acc += mu[m - 1];
        for (std::size_t k = 1; k < m; ++k) {
            acc += -pascal[m - 1][k - 1] * kappa[k - 1] * mu[m - k - 1];
        }
        kappa[m - 1] = acc.value();
    }
    return kappa;
}

template <typename T>
std::vector<T> moments_to_f(const std::vector<T>& mu)
{
    std::vector<T> f = moments_to_cumulants(mu);
    T factorial(1);
    for (std::size_t m = 1; m <= f.size(); ++m) {
        if (m > 1) {
            factorial *= T(static_cast<int>(m) - 1);
        }
        f[m - 1] /= factorial;
    }
    return f;
}

template <typename T>
std::vector<T> f_to_moments(const std::vector<T>& f)
{
    require_finite(f, "cumulant");
    const std::size_t n = f.size();
    const auto pascal = pascal_triangle<T>(static_cast<int>(n));
    std::vector<T> kappa(n);
    T factorial(1);
    for (std::size_t m = 1; m <= n; ++m) {
        if (m > 1) {
            factorial *= T(static_cast<int>(m) - 1);
        }
        kappa[m - 1] = f[m - 1] * factorial;
    }
    std::vector<T> mu(n);
    for (std::size_t m = 1; m <= n; ++m) {
        CompensatedSum<T> acc;
        acc += kappa[m - 1];
        for (std::size_t k = 1; k < m; ++k) {
            acc += pascal[m - 1][k - 1] * kappa[k - 1] * mu[m - k - 1];
        }
        mu[m - 1] = acc.value();
    }
    return mu;
}

template <typename T>
std::vector<T> scaled_moments_to_f(const std::vector<T>& scaled)
{
    require_finite(scaled, "scaled moment");
    const std::size_t n = scaled.size();
    std::vector<T> nu(n + 1);
    nu[0] = T(1);
    T half_power(1);
    for (std::size_t m = 1; m <= n; ++m) {
        half_power /= T(2);
        nu[m] = scaled[m - 1] * half_power;
    }
    std::vector<T> f(n);
    for (std::size_t m = 1; m <= n; ++m) {
        CompensatedSum<T> acc;
        acc += T(static_cast<int>(m)) * nu[m];
        for (std::size_t k = 1; k < m; ++k) {
            acc += -f[k - 1] * nu[m - k];
        }
        f[m - 1] = acc.value();
    }
    return f;
}

template <typename T>
std::vector<T> f_to_scaled_moments(const std::vector<T>& f)
{
    require_finite(f, "cumulant");
    const std::size_t n = f.size();
    std::vector<T> nu(n + 1);
    nu[0] = T(1);
    for (std::size_t m = 1; m <= n; ++m) {
        CompensatedSum<T> acc;
        for (std::size_t k = 1; k <= m; ++k) {
            acc += f[k - 1] * nu[m - k];
        }
        nu[m] = acc.value() / T(static_cast<int>(m));
    }
    std::vector<T> scaled(n);
    T power(1);
    for (std::size_t m = 1; m <= n; ++m) {
        power *= T(2);
        scaled[m - 1] = nu[m] * power;
    }
    return scaled;
}

template <typename T>
std::vector<T> probabilities_to_f(const PhotonDistribution<T>& p, int n)
{
    if (n < 0) {
        n = p.max_photons();
    }
    const std::vector<T> relative = relative_probabilities(p, n);
    return scaled_moments_to_f(relative_to_scaled_moments(relative, p.mode_count));
}

#define GAUSS_COUNTER_INSTANTIATE(T)                                                   \
    template std::vector<T> moments_to_cumulants<T>(const std::vector<T>&);            \
    template std::vector<T> moments_to_f<T>(const std::vector<T>&);                    \
    template std::vector<T> f_to_moments<T>(const std::vector<T>&);                    \
    template std::vector<T> scaled_moments_to_f<T>(const std::vector<T>&);             \
    template std::vector<T> f_to_scaled_moments<T>(const std::vector<T>&);             \
    template std::vector<T> probabilities_to_f<T>(const PhotonDistribution<T>&, int);

GAUSS_COUNTER_INSTANTIATE(double)
GAUSS_COUNTER_INSTANTIATE(Real)

#undef GAUSS_COUNTER_INSTANTIATE

}  // namespace gauss_counter
