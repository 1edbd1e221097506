#include <doctest.h>

#include <cmath>

#include "gauss_counter/error.hpp"
#include "gauss_counter/forward_engine.hpp"
#include "gauss_counter/ml_estimator.hpp"
#include "gauss_counter/oracle_sampler.hpp"

using namespace gauss_counter;

namespace {

FitConfig single_block(int modes, bool displaced)
{
    FitConfig config;
    config.mode_count = modes;
    config.structure = {{2 * modes}, {displaced}};
    config.restarts = 4;
    config.seed = 11;
    return config;
}

// Counts proportional to an exact distribution, with the remainder at M + 1.
SampleRun exact_run(const NormalParameters& np, int max_photons, double total)
{
    const auto p = forward_distribution<double>(np, max_photons, ForwardMethod::generating_function);
    SampleRun run{np.mode_count(), 0, 0, 1.0, {}};
    std::uint64_t used = 0;
    for (int n = 0; n <= max_photons; ++n) {
        const auto c = static_cast<std::uint64_t>(std::llround(p.probabilities[static_cast<std::size_t>(n)] * total));
        if (c > 0) {
            run.counts[n] = c;
            used += c;
        }
    }
    const auto target = static_cast<std::uint64_t>(total);
    if (target > used) {
        run.counts[max_photons + 1] = target - used;
    }
    run.sample_count = used + (target > used ? target - used : 0);
    return run;
}

}  // namespace

TEST_CASE("negative_log_likelihood prefers the generating state")
{
    const auto run = sample_counts({{3.0}, {2}, {0.0}}, 100000, 1.0, 21);
    const auto config = single_block(1, false);
    const double at_truth = negative_log_likelihood({{3.0}, {2}, {0.0}}, run, config);
    const double off = negative_log_likelihood({{2.5}, {2}, {0.0}}, run, config);
    CHECK(at_truth <= off);
    CHECK(at_truth >= multinomial_entropy_bound(run, config));
}

TEST_CASE("negative_log_likelihood: empty bins contribute nothing")
{
    const NormalParameters np{{3.0}, {2}, {0.0}};
    SampleRun run{1, 0, 100, 1.0, {{0, 60}, {2, 40}}};
    auto config = single_block(1, false);
    config.max_photons = 8;
    const double nll = negative_log_likelihood(np, run, config);
    const double expected = -(60 * std::log(0.5) + 40 * std::log(0.125));
    CHECK(nll == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("negative_log_likelihood: infeasible points are +inf")
{
    SampleRun run{1, 0, 10, 1.0, {{0, 10}}};
    const auto config = single_block(1, false);
    // Spectrum {0.5, 0.5} is below the vacuum bound.
    CHECK(std::isinf(negative_log_likelihood({{0.5}, {2}, {0.0}}, run, config)));
}

TEST_CASE("fit: vacuum counts")
{
    SampleRun run{1, 0, 10000, 1.0, {{0, 10000}}};
    const auto config = single_block(1, true);
    const auto result = fit(run, config);
    CHECK(result.parameters.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(result.parameters.displacement_norms[0] <= 1e-3);
    CHECK(std::abs(result.negative_log_likelihood - multinomial_entropy_bound(run, config)) <= 1e-9);
}

TEST_CASE("fit: exact data reaches the entropy bound")
{
    const NormalParameters np{{2.0, 1.0}, {2, 2}, {std::sqrt(2.0), 0.0}};
    const auto run = exact_run(np, 16, 1e12);
    FitConfig config;
    config.mode_count = 2;
    config.max_photons = 16;
    config.structure = {{2, 2}, {true, false}};
    config.restarts = 3;
    config.seed = 5;
    const auto result = fit(run, config);
    const double bound = multinomial_entropy_bound(run, config);
    CHECK(std::abs(result.negative_log_likelihood - bound) <= 1e-9 * std::abs(bound));
    CHECK(result.parameters.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(result.parameters.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(result.parameters.displacement_norms[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("negative_log_likelihood at the truth equals the entropy bound on exact data")
{
    const NormalParameters np{{2.5, 1.2}, {1, 3}, {0.6, 0.3}};
    const auto run = exact_run(np, 16, 1e12);
    FitConfig config;
    config.mode_count = 2;
    config.max_photons = 16;
    config.structure = {{1, 3}, {true, true}};
    const double bound = multinomial_entropy_bound(run, config);
    CHECK(std::abs(negative_log_likelihood(np, run, config) - bound) <= 1e-10 * std::abs(bound));
}

TEST_CASE("fit: best-so-far is monotone and runs are deterministic")
{
    const auto run = sample_counts({{2.5}, {2}, {0.8}}, 20000, 1.0, 31);
    auto config = single_block(1, true);
    config.restarts = 5;
    config.seed_from_inversion = false;
    const auto a = fit(run, config);
    REQUIRE(a.best_so_far.size() == 5);
    for (std::size_t i = 1; i < a.best_so_far.size(); ++i) {
        CHECK(a.best_so_far[i] <= a.best_so_far[i - 1]);
    }
    CHECK(a.negative_log_likelihood == a.best_so_far.back());
    const auto b = fit(run, config);
    CHECK(a.negative_log_likelihood == b.negative_log_likelihood);
    CHECK(a.parameters.eigenvalues == b.parameters.eigenvalues);
    CHECK(a.parameters.displacement_norms == b.parameters.displacement_norms);
}

TEST_CASE("fit: thermal counts recover the eigenvalue")
{
    const auto run = sample_counts({{3.0}, {2}, {0.0}}, 100000, 1.0, 41);
    const auto result = fit(run, single_block(1, false));
    CHECK(std::abs(result.parameters.eigenvalues[0] - 3.0) <= 0.05 * 3.0);
}

TEST_CASE("fit: lossy counts are fitted through the loss model")
{
    const NormalParameters np{{4.0}, {2}, {0.0}};
    const auto run = sample_counts(np, 200000, 0.5, 42);
    const auto result = fit(run, single_block(1, false));
    CHECK(std::abs(result.parameters.eigenvalues[0] - 4.0) <= 0.05 * 4.0);
}

TEST_CASE("validate_fit_config: structure errors")
{
    auto code = [](const FitConfig& c) {
        try {
            validate_fit_config(c);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::ParseError;
    };
    FitConfig bad_sum = single_block(2, false);
    bad_sum.structure = {{2}, {false}};
    CHECK(code(bad_sum) == ErrorCode::StructureMismatch);
    FitConfig bad_flags = single_block(1, false);
    bad_flags.structure.displaced = {true, false};
    CHECK(code(bad_flags) == ErrorCode::StructureMismatch);
    FitConfig bad_box = single_block(1, false);
    bad_box.lambda_max = 0.5;
    CHECK(code(bad_box) == ErrorCode::InvalidArgument);
    CHECK(code(single_block(1, true)) == ErrorCode::ParseError);
}
