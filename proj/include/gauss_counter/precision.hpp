#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Core>

namespace gauss_counter {

/// Working precision of the exact inversion path.
///
/// The Hankel matrices built from f_1..f_8S have full-rank singular-value
/// ratios down to ~1e-40 for S = 3, while a double-rounded input perturbs f
/// at ~1e-16. 100 decimal digits keeps the rank decision clean and leaves the
/// double roots of the minimal polynomial accurate to ~1e-45.
inline constexpr unsigned real_digits = 100;

using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<real_digits>,
    boost::multiprecision::et_off>;

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

inline double to_double(double x) noexcept { return x; }
inline double to_double(const Real& x) { return static_cast<double>(x); }

template <typename To, typename From>
std::vector<To> cast_vector(const std::vector<From>& v)
{
    std::vector<To> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        out.push_back(static_cast<To>(x));
    }
    return out;
}

/// Full-precision decimal representation (17 significant digits for double).
std::string to_decimal(double x);
std::string to_decimal(const Real& x);

/// Parses a decimal string at full working precision.
Real parse_real(const std::string& text);

template <typename T>
bool is_finite(const T& x)
{
    using std::isfinite;
    using boost::multiprecision::isfinite;
    return isfinite(x);
}

template <typename T>
T pi()
{
    if constexpr (std::is_same_v<T, double>) {
        return 3.14159265358979323846264338327950288;
    } else {
        return boost::math::constants::pi<T>();
    }
}

/// Neumaier-compensated running sum.
template <typename T>
class CompensatedSum {
public:
    CompensatedSum() : sum_(0), carry_(0) {}

    void add(const T& x)
    {
        using std::abs;
        T t = sum_ + x;
        if (abs(sum_) >= abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(const T& x)
    {
        add(x);
        return *this;
    }

    T value() const { return sum_ + carry_; }

private:
    T sum_;
    T carry_;
};

/// Binomial coefficient C(n, k) evaluated in T. Exact for double while the
/// result stays below 2^53; relative error ~k ulp beyond.
template <typename T>
T binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return T(0);
    }
    k = std::min(k, n - k);
    T value(1);
    for (int i = 1; i <= k; ++i) {
        value *= T(n - k + i);
        value /= T(i);
    }
    return value;
}

/// Pascal triangle rows 0..max_n in T, `table[n][k]` = C(n, k).
template <typename T>
std::vector<std::vector<T>> pascal_triangle(int max_n)
{
    std::vector<std::vector<T>> table(static_cast<std::size_t>(max_n) + 1);
    for (int n = 0; n <= max_n; ++n) {
        auto& row = table[static_cast<std::size_t>(n)];
        row.assign(static_cast<std::size_t>(n) + 1, T(1));
        for (int k = 1; k < n; ++k) {
            const auto& prev = table[static_cast<std::size_t>(n) - 1];
            row[static_cast<std::size_t>(k)] = prev[static_cast<std::size_t>(k) - 1] + prev[static_cast<std::size_t>(k)];
        }
    }
    return table;
}

}  // namespace gauss_counter
