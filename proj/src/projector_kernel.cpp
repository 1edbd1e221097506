#include "gauss_counter/projector_kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gauss_counter/error.hpp"

namespace gauss_counter {

namespace {

// Beyond this photon number the factorials in the coefficients are handled
// in log-magnitude form.
constexpr int direct_recursion_limit = 30;

template <typename T>
T sign_of_power(int exponent)
{
    return exponent % 2 == 0 ? T(1) : T(-1);
}

template <typename T>
void check_representable(const T& value, const T& log_magnitude)
{
    using std::log;
    if (!is_finite(value)) {
        throw Error(ErrorCode::Overflow, "projector coefficient exceeds the floating range");
    }
    if (value == T(0) && log_magnitude > log(std::numeric_limits<double>::min())) {
        throw Error(ErrorCode::Overflow, "projector coefficient underflowed");
    }
}

// Signed binomial table C_kl = (-1)^(k+l) C(k+S-1, l+S-1), 0 <= l <= k <= n.
template <typename T>
std::vector<std::vector<T>> signed_binomials(int mode_count, int n)
{
    const auto pascal = pascal_triangle<T>(n + mode_count - 1);
    std::vector<std::vector<T>> table(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        auto& row = table[static_cast<std::size_t>(k)];
        row.resize(static_cast<std::size_t>(k) + 1);
        const auto& prow = pascal[static_cast<std::size_t>(k + mode_count - 1)];
        for (int l = 0; l <= k; ++l) {
            const T& b = prow[static_cast<std::size_t>(l + mode_count - 1)];
            row[static_cast<std::size_t>(l)] = (k + l) % 2 == 0 ? b : T(-b);
        }
    }
    return table;
}

void check_mode_count(int mode_count)
{
    if (mode_count < 1) {
        throw Error(ErrorCode::InvalidArgument, "mode count must be positive");
    }
}

}  // namespace

template <typename T>
T ProjectorPolynomial<T>::operator()(const T& x) const
{
    T acc(0);
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

template <typename T>
ProjectorPolynomial<T> projector_polynomial(int mode_count, int photon_number)
{
    using std::exp;
    using std::log;
    check_mode_count(mode_count);
    if (photon_number < 0) {
        throw Error(ErrorCode::InvalidArgument, "photon number must be non-negative");
    }
    const int n = photon_number;
    const int s = mode_count;
    ProjectorPolynomial<T> poly{s, n, {}};
    poly.coefficients.resize(static_cast<std::size_t>(n) + 1);

    if (n <= direct_recursion_limit) {
        T a = sign_of_power<T>(n) * binomial<T>(n + s - 1, s - 1);
        for (int i = 0; i < s; ++i) {
            a /= pi<T>();
        }
        poly.coefficients[0] = a;
        for (int l = 1; l <= n; ++l) {
            a *= T(-2 * (n - l + 1));
            a /= T(l) * T(l + s - 1);
            poly.coefficients[static_cast<std::size_t>(l)] = a;
        }
        return poly;
    }

    T log_mag = -T(s) * log(pi<T>());
    for (int i = 1; i < s; ++i) {
        log_mag += log(T(n + i) / T(i));
    }
    for (int l = 0; l <= n; ++l) {
        if (l > 0) {
            log_mag += log(T(2 * (n - l + 1))) - log(T(l) * T(l + s - 1));
        }
        const T value = sign_of_power<T>(n + l) * exp(log_mag);
        check_representable(value, log_mag);
        poly.coefficients[static_cast<std::size_t>(l)] = value;
    }
    return poly;
}

template <typename T>
MomentProbabilityMap<T> moment_probability_map(int mode_count, int size)
{
    check_mode_count(mode_count);
    if (size < 1) {
        throw Error(ErrorCode::InvalidArgument, "map size must be positive");
    }
    const auto c = signed_binomials<T>(mode_count, size);
    MomentProbabilityMap<T> map{mode_count, size, Mat<T>::Zero(size, size), Vec<T>(size)};
    for (int k = 1; k <= size; ++k) {
        map.offset(k - 1) = c[static_cast<std::size_t>(k)][0];
        T scale(1);  // 2^l / l!
        for (int l = 1; l <= k; ++l) {
            scale *= T(2);
            scale /= T(l);
            const T entry = c[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] * scale;
            if (!is_finite(entry)) {
                throw Error(ErrorCode::Overflow, "moment map entry exceeds the floating range");
            }
            map.matrix(k - 1, l - 1) = entry;
        }
    }
    return map;
}

template <typename T>
std::vector<T> relative_to_scaled_moments(const std::vector<T>& relative, int mode_count)
{
    check_mode_count(mode_count);
    const int n = static_cast<int>(relative.size());
    const auto c = signed_binomials<T>(mode_count, n);
    std::vector<T> scaled(static_cast<std::size_t>(n) + 1);
    scaled[0] = T(1);
    for (int k = 1; k <= n; ++k) {
        CompensatedSum<T> acc;
        acc += relative[static_cast<std::size_t>(k) - 1];
        const auto& row = c[static_cast<std::size_t>(k)];
        for (int l = 0; l < k; ++l) {
            acc += -row[static_cast<std::size_t>(l)] * scaled[static_cast<std::size_t>(l)];
        }
        scaled[static_cast<std::size_t>(k)] = acc.value();
    }
    scaled.erase(scaled.begin());
    return scaled;
}

template <typename T>
std::vector<T> scaled_moments_to_relative(const std::vector<T>& scaled, int mode_count)
{
    check_mode_count(mode_count);
    const int n = static_cast<int>(scaled.size());
    const auto c = signed_binomials<T>(mode_count, n);
    std::vector<T> relative(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const auto& row = c[static_cast<std::size_t>(k)];
        CompensatedSum<T> acc;
        acc += row[0];
        for (int l = 1; l <= k; ++l) {
            acc += row[static_cast<std::size_t>(l)] * scaled[static_cast<std::size_t>(l) - 1];
        }
        relative[static_cast<std::size_t>(k) - 1] = acc.value();
    }
    return relative;
}

template <typename T>
std::vector<T> relative_probabilities(const PhotonDistribution<T>& p, int n)
{
    check_mode_count(p.mode_count);
    if (n < 0 || static_cast<int>(p.probabilities.size()) < n + 1) {
        throw Error(ErrorCode::InsufficientData,
                    "need p_0..p_" + std::to_string(n) + ", got "
                        + std::to_string(p.probabilities.size()) + " entries");
    }
    for (int k = 0; k <= n; ++k) {
        if (!is_finite(p.probabilities[static_cast<std::size_t>(k)])) {
            throw Error(ErrorCode::NonFiniteInput, "probability p_" + std::to_string(k)
                                                       + " is not finite");
        }
    }
    const T& p0 = p.probabilities[0];
    if (!(p0 > T(0))) {
        throw Error(ErrorCode::ZeroP0, "p_0 must be positive");
    }
    std::vector<T> relative(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        relative[static_cast<std::size_t>(k) - 1] = p.probabilities[static_cast<std::size_t>(k)] / p0;
    }
    return relative;
}

template <typename T>
std::vector<T> probabilities_to_moments(const PhotonDistribution<T>& p, int n)
{
    std::vector<T> mu = relative_to_scaled_moments(relative_probabilities(p, n), p.mode_count);
    T factor(1);  // l! / 2^l
    for (std::size_t l = 0; l < mu.size(); ++l) {
        factor *= T(static_cast<int>(l) + 1);
        factor /= T(2);
        mu[l] *= factor;
        if (!is_finite(mu[l])) {
            throw Error(ErrorCode::Overflow, "moment mu_" + std::to_string(l + 1)
                                                 + " exceeds the floating range");
        }
    }
    return mu;
}

template <typename T>
std::vector<T> moments_to_relative_probabilities(const std::vector<T>& mu, int mode_count)
{
    std::vector<T> scaled(mu.size());
    T factor(1);  // 2^l / l!
    for (std::size_t l = 0; l < mu.size(); ++l) {
        factor *= T(2);
        factor /= T(static_cast<int>(l) + 1);
        scaled[l] = mu[l] * factor;
    }
    return scaled_moments_to_relative(scaled, mode_count);
}

#define GAUSS_COUNTER_INSTANTIATE(T)                                                              \
    template struct ProjectorPolynomial<T>;                                                       \
    template ProjectorPolynomial<T> projector_polynomial<T>(int, int);                            \
    template MomentProbabilityMap<T> moment_probability_map<T>(int, int);                         \
    template std::vector<T> relative_to_scaled_moments<T>(const std::vector<T>&, int);            \
    template std::vector<T> scaled_moments_to_relative<T>(const std::vector<T>&, int);            \
    template std::vector<T> relative_probabilities<T>(const PhotonDistribution<T>&, int);         \
    template std::vector<T> probabilities_to_moments<T>(const PhotonDistribution<T>&, int);       \
    template std::vector<T> moments_to_relative_probabilities<T>(const std::vector<T>&, int);

GAUSS_COUNTER_INSTANTIATE(double)
GAUSS_COUNTER_INSTANTIATE(Real)

#undef GAUSS_COUNTER_INSTANTIATE

}  // namespace gauss_counter
