#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "gauss_counter/error.hpp"
#include "gauss_counter/forward_engine.hpp"
#include "gauss_counter/oracle_sampler.hpp"
#include "support.hpp"

using namespace gauss_counter;

namespace {

GaussianStateSpec diagonal_state(double a, double b, Eigen::Vector2d d = Eigen::Vector2d::Zero())
{
    return {1, Eigen::Vector2d(a, b).asDiagonal(), d};
}

struct ThreadOverride {
    explicit ThreadOverride(const char* value) { setenv("GAUSS_COUNTER_THREADS", value, 1); }
    ~ThreadOverride() { unsetenv("GAUSS_COUNTER_THREADS"); }
};

}  // namespace

TEST_CASE("laguerre_sequence matches explicit polynomials")
{
    const double y = 0.7;
    const auto l = laguerre_sequence(3, 1.0, y);
    CHECK(l[0] == doctest::Approx(1.0));
    CHECK(l[1] == doctest::Approx(2.0 - y));
    CHECK(l[2] == doctest::Approx(0.5 * (y * y - 6 * y + 6)));
    CHECK(l[3] == doctest::Approx((-y * y * y + 12 * y * y - 36 * y + 24) / 6.0));
}

TEST_CASE("mc_probability: examples")
{
    const auto vac = mc_probability(diagonal_state(1, 1), 0, 1000000, 1);
    CHECK(std::abs(vac.estimate - 1.0) <= 5 * vac.standard_error + 1e-12);
    const auto thermal = mc_probability(diagonal_state(3, 3), 2, 1000000, 2);
    CHECK(std::abs(thermal.estimate - 0.125) <= 5 * thermal.standard_error);
    const auto coherent = mc_probability(diagonal_state(1, 1, {std::sqrt(2.0), 0.0}), 1, 1000000, 3);
    CHECK(std::abs(coherent.estimate - std::exp(-1.0)) <= 5 * coherent.standard_error);
    CHECK_THROWS_AS(mc_probability(diagonal_state(1, 1), 0, 100, 1), Error);
}

TEST_CASE("property: Monte Carlo oracle agrees with the forward engine")
{
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 4; ++trial) {
        const int s = 1 + trial % 3;
        const auto spec = test_support::random_physical_state(s, rng);
        const auto exact = forward_from_spec<double>(spec, 8 * s, ForwardMethod::generating_function);
        const auto mc = mc_probabilities(spec, 8 * s, 200000, 100 + static_cast<std::uint64_t>(trial));
        for (int n = 0; n <= 8 * s; ++n) {
            const auto i = static_cast<std::size_t>(n);
            CHECK(std::abs(mc[i].estimate - exact.probabilities[i]) <= 5 * mc[i].standard_error);
        }
    }
}

TEST_CASE("Monte Carlo results do not depend on the worker count")
{
    const auto spec = diagonal_state(2.0, 0.8, {0.3, 0.1});
    std::vector<MonteCarloEstimate> one;
    {
        ThreadOverride single("1");
        one = mc_probabilities(spec, 4, 100000, 9);
    }
    std::vector<MonteCarloEstimate> many;
    {
        ThreadOverride several("5");
        many = mc_probabilities(spec, 4, 100000, 9);
    }
    for (std::size_t n = 0; n < one.size(); ++n) {
        CHECK(one[n].estimate == many[n].estimate);
        CHECK(one[n].standard_error == many[n].standard_error);
    }
}

TEST_CASE("sample_counts: examples")
{
    const auto vac = sample_counts({{1.0}, {2}, {0.0}}, 10000, 0.6, 3);
    CHECK(vac.counts.size() == 1);
    CHECK(vac.counts.at(0) == 10000);

    const std::uint64_t n = 1000000;
    const auto run = sample_counts({{3.0}, {2}, {0.0}}, n, 1.0, 4);
    const double p0 = static_cast<double>(run.counts.at(0)) / n;
    CHECK(std::abs(p0 - 0.5) <= 5 * std::sqrt(0.25 / n));

    const auto thinned = sample_counts({{3.0}, {2}, {0.0}}, n, 0.5, 5);
    double mean = 0.0;
    for (const auto& [k, count] : thinned.counts) {
        mean += k * static_cast<double>(count);
    }
    mean /= n;
    // Thinned thermal law: geometric with mean 0.5, variance 0.75.
    CHECK(std::abs(mean - 0.5) <= 5 * std::sqrt(0.75 / n));
}

TEST_CASE("sample_counts: reproducible and independent of the worker count")
{
    const NormalParameters np{{2.5, 0.9}, {1, 1}, {1.0, 0.2}};
    SampleRun a;
    SampleRun b;
    {
        ThreadOverride single("1");
        a = sample_counts(np, 200000, 0.7, 77);
    }
    {
        ThreadOverride several("3");
        b = sample_counts(np, 200000, 0.7, 77);
    }
    CHECK(a.counts == b.counts);
    const auto c = sample_counts(np, 200000, 0.7, 78);
    CHECK(a.counts != c.counts);
    std::uint64_t total = 0;
    for (const auto& [k, count] : a.counts) {
        CHECK(k >= 0);
        total += count;
    }
    CHECK(total == a.sample_count);
}

TEST_CASE("property: thinning matches the pure-loss channel")
{
    const NormalParameters np{{4.0, 1.5}, {2, 2}, {1.2, 0.4}};
    const double eta = 0.6;
    const std::uint64_t n = 1000000;
    const auto run = sample_counts(np, n, eta, 8);
    const auto lossy = forward_distribution<double>(apply_uniform_loss(np, eta), 12,
                                                    ForwardMethod::generating_function);
    const auto emp = empirical_distribution(run, 12);
    for (std::size_t k = 0; k < lossy.probabilities.size(); ++k) {
        const double p = lossy.probabilities[k];
        CHECK(std::abs(emp.probabilities[k] - p) <= 5 * std::sqrt(p * (1 - p) / n) + 1e-12);
    }
}

TEST_CASE("empirical_distribution: examples")
{
    SampleRun half{1, 0, 100, 1.0, {{0, 50}, {1, 50}}};
    const auto a = empirical_distribution(half, 2);
    CHECK(a.probabilities == std::vector<double>{0.5, 0.5, 0.0});
    CHECK(a.sample_count == 100u);
    SampleRun single{1, 0, 1, 1.0, {{0, 1}}};
    CHECK(empirical_distribution(single, 0).probabilities == std::vector<double>{1.0});

    const auto run = sample_counts({{3.0}, {2}, {0.0}}, 200000, 1.0, 10);
    const auto p = empirical_distribution(run, 8);
    double total = 0.0;
    for (int k = 0; k <= 8; ++k) {
        const double expected = std::pow(2.0, -(k + 1));
        CHECK(std::abs(p.probabilities[static_cast<std::size_t>(k)] - expected)
              <= 5 * std::sqrt(expected * (1 - expected) / 200000));
        total += p.probabilities[static_cast<std::size_t>(k)];
    }
    CHECK(total <= 1.0);

    SampleRun empty{1, 0, 0, 1.0, {}};
    try {
        empirical_distribution(empty, 3);
        FAIL("expected EmptyRun");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyRun);
    }
}
