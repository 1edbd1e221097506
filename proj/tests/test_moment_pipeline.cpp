#include <doctest.h>

#include <cmath>
#include <random>

#include "gauss_counter/error.hpp"
#include "gauss_counter/forward_engine.hpp"
#include "gauss_counter/moment_pipeline.hpp"
#include "support.hpp"

using namespace gauss_counter;

TEST_CASE("moments_to_f: examples")
{
    const auto thermal = moments_to_f<double>({0.75, 9.0 / 8.0});
    CHECK(thermal[0] == doctest::Approx(0.75));
    CHECK(thermal[1] == doctest::Approx(9.0 / 16.0));
    const auto vacuum = moments_to_f<double>({0.5, 0.5});
    CHECK(vacuum[0] == doctest::Approx(0.5));
    CHECK(vacuum[1] == doctest::Approx(0.25));
    CHECK(moments_to_f<double>({1.7})[0] == doctest::Approx(1.7));
    CHECK_THROWS_AS(moments_to_f<double>({1.0, INFINITY}), Error);
}

TEST_CASE("f_to_moments: examples")
{
    const auto vacuum = f_to_moments<double>({0.5, 0.25});
    CHECK(vacuum[0] == doctest::Approx(0.5));
    CHECK(vacuum[1] == doctest::Approx(0.5));
    const auto thermal = f_to_moments<double>({0.75, 9.0 / 16.0});
    CHECK(thermal[0] == doctest::Approx(0.75));
    CHECK(thermal[1] == doctest::Approx(9.0 / 8.0));
    CHECK(f_to_moments<double>({0.3})[0] == doctest::Approx(0.3));
}

TEST_CASE("raw cumulants differ from f by (n-1)!")
{
    // Thermal gamma = 3: f_3 = 27/64, kappa_3 = 2! f_3 = 27/32.
    const auto mu = f_to_moments<double>({0.75, 9.0 / 16.0, 27.0 / 64.0});
    const auto kappa = moments_to_cumulants(mu);
    CHECK(kappa[2] == doctest::Approx(27.0 / 32.0));
    CHECK(moments_to_f(mu)[2] == doctest::Approx(27.0 / 64.0));
}

TEST_CASE("probabilities_to_f: examples")
{
    PhotonDistribution<double> thermal{1, {}, std::nullopt};
    PhotonDistribution<double> coherent{1, {}, std::nullopt};
    PhotonDistribution<double> vacuum{1, {1.0}, std::nullopt};
    double factorial = 1.0;
    for (int n = 0; n <= 8; ++n) {
        if (n > 0) {
            factorial *= n;
            vacuum.probabilities.push_back(0.0);
        }
        thermal.probabilities.push_back(std::pow(2.0, -(n + 1)));
        coherent.probabilities.push_back(std::exp(-1.0) / factorial);
    }
    const auto ft = probabilities_to_f(thermal);
    const auto fc = probabilities_to_f(coherent);
    const auto fv = probabilities_to_f(vacuum);
    REQUIRE(ft.size() == 8);
    for (int n = 1; n <= 8; ++n) {
        const auto i = static_cast<std::size_t>(n) - 1;
        CHECK(ft[i] == doctest::Approx(std::pow(0.75, n)).epsilon(1e-12));
        CHECK(fc[i] == doctest::Approx((1.0 + n) * std::pow(0.5, n)).epsilon(1e-12));
        CHECK(fv[i] == doctest::Approx(std::pow(0.5, n)).epsilon(1e-12));
    }
    CHECK(probabilities_to_f(thermal, 3).size() == 3);
}

TEST_CASE("property: f and moments are mutual inverses")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> f(24);
        for (double& x : f) {
            x = u(rng);
        }
        const auto back = moments_to_f(f_to_moments(f));
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(std::abs(back[i] - f[i]) <= 1e-10 * std::max(1.0, std::abs(f[i])));
        }
        const auto back_scaled = scaled_moments_to_f(f_to_scaled_moments(f));
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(std::abs(back_scaled[i] - f[i]) <= 1e-10 * std::max(1.0, std::abs(f[i])));
        }
    }
}

TEST_CASE("property: scaled moments are 2^n mu_n / n!")
{
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> f(16);
    for (double& x : f) {
        x = u(rng);
    }
    const auto mu = f_to_moments(f);
    const auto s = f_to_scaled_moments(f);
    double scale = 1.0;
    for (std::size_t n = 1; n <= f.size(); ++n) {
        scale *= 2.0 / static_cast<double>(n);
        CHECK(s[n - 1] == doctest::Approx(mu[n - 1] * scale).epsilon(1e-12));
    }
}

TEST_CASE("property: f is positive for valid states")
{
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const int s = 1 + trial % 3;
        const auto np = test_support::random_normal_parameters(s, rng);
        const auto p = forward_distribution<Real>(np, 8 * s);
        for (const Real& x : probabilities_to_f(p)) {
            CHECK(x > Real(0));
        }
    }
}
