#include "gauss_counter/oracle_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "gauss_counter/error.hpp"
#include "gauss_counter/forward_engine.hpp"
#include "gauss_counter/parallel.hpp"

namespace gauss_counter {

namespace {

constexpr std::uint64_t shard_size = 1 << 15;

std::size_t shard_count(std::uint64_t samples)
{
    return static_cast<std::size_t>((samples + shard_size - 1) / shard_size);
}

std::uint64_t shard_samples(std::uint64_t samples, std::size_t shard)
{
    const std::uint64_t start = shard * shard_size;
    return std::min(shard_size, samples - start);
}

struct MomentSums {
    std::vector<double> sum;
    std::vector<double> sum_sq;
};

}  // namespace

NormalParameters apply_uniform_loss(const NormalParameters& np, double efficiency)
{
    validate_normal_parameters(np);
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "efficiency must lie in (0, 1]");
    }
    NormalParameters out = np;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out.eigenvalues[k] = efficiency * np.eigenvalues[k] + (1.0 - efficiency);
        out.displacement_norms[k] = std::sqrt(efficiency) * np.displacement_norms[k];
    }
    return out;
}

std::vector<double> laguerre_sequence(int max_n, double alpha, double y)
{
    std::vector<double> l(static_cast<std::size_t>(max_n) + 1);
    l[0] = 1.0;
    if (max_n >= 1) {
        l[1] = 1.0 + alpha - y;
    }
    for (int k = 1; k < max_n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        l[i + 1] = ((2.0 * k + 1.0 + alpha - y) * l[i] - (k + alpha) * l[i - 1]) / (k + 1.0);
    }
    return l;
}

std::vector<MonteCarloEstimate> mc_probabilities(const GaussianStateSpec& spec, int max_photons,
                                                 std::uint64_t samples, std::uint64_t seed)
{
    validate_state(spec, ValidationMode::mathematical);
    if (max_photons < 0) {
        throw Error(ErrorCode::InvalidArgument, "photon number must be non-negative");
    }
    if (samples < 10000) {
        throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs at least 10^4 samples");
    }
    const Eigen::MatrixXd half_cov = 0.5 * (spec.covariance + spec.covariance.transpose()) * 0.5;
    const Eigen::LLT<Eigen::MatrixXd> llt(half_cov);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
    }
    const Eigen::MatrixXd factor = llt.matrixL();
    if ((factor * factor.transpose() - half_cov).norm() > 1e-10 * half_cov.norm()) {
        throw Error(ErrorCode::NumericalInstability, "Cholesky factorization residual too large");
    }

    const int s = spec.mode_count;
    const double alpha = s - 1;
    const double prefactor = std::ldexp(1.0, s);
    const auto bins = static_cast<std::size_t>(max_photons) + 1;
    const std::size_t shards = shard_count(samples);
    std::vector<MomentSums> partial(shards);

    parallel_for(shards, [&](std::size_t shard) {
        std::mt19937_64 rng(shard_seed(seed, shard));
        std::normal_distribution<double> normal;
        MomentSums sums{std::vector<double>(bins, 0.0), std::vector<double>(bins, 0.0)};
        Eigen::VectorXd z(2 * s);
        const std::uint64_t count = shard_samples(samples, shard);
        for (std::uint64_t i = 0; i < count; ++i) {
            for (Eigen::Index j = 0; j < z.size(); ++j) {
                z(j) = normal(rng);
            }
            const Eigen::VectorXd r = spec.displacement + factor * z;
            const double x = r.squaredNorm();
            const auto l = laguerre_sequence(max_photons, alpha, 2.0 * x);
            const double envelope = prefactor * std::exp(-x);
            for (std::size_t n = 0; n < bins; ++n) {
                const double w = (n % 2 == 0 ? envelope : -envelope) * l[n];
                sums.sum[n] += w;
                sums.sum_sq[n] += w * w;
            }
        }
        partial[shard] = std::move(sums);
    });

    std::vector<MonteCarloEstimate> out(bins);
    const double total = static_cast<double>(samples);
    for (std::size_t n = 0; n < bins; ++n) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& p : partial) {
            sum += p.sum[n];
            sum_sq += p.sum_sq[n];
        }
        const double mean = sum / total;
        const double variance = std::max(0.0, (sum_sq - total * mean * mean) / (total - 1.0));
        out[n] = {mean, std::sqrt(variance / total)};
    }
    return out;
}

MonteCarloEstimate mc_probability(const GaussianStateSpec& spec, int photon_number,
                                  std::uint64_t samples, std::uint64_t seed)
{
    return mc_probabilities(spec, photon_number, samples, seed).back();
}

SampleRun sample_counts(const NormalParameters& np, std::uint64_t samples, double efficiency,
                        std::uint64_t seed)
{
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "efficiency must lie in (0, 1]");
    }
    if (samples == 0) {
        throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    }
    const int max_photons = tail_photon_bound(np);
    const auto p = forward_distribution<double>(np, max_photons, ForwardMethod::generating_function);

    std::vector<double> cdf(p.probabilities.size());
    double running = 0.0;
    for (std::size_t n = 0; n < cdf.size(); ++n) {
        running += p.probabilities[n];
        cdf[n] = running;
    }
    cdf.back() = 1.0;

    const std::size_t shards = shard_count(samples);
    std::vector<std::vector<std::uint64_t>> partial(shards);
    parallel_for(shards, [&](std::size_t shard) {
        std::mt19937_64 rng(shard_seed(seed, shard));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::vector<std::uint64_t> hist(cdf.size(), 0);
        const std::uint64_t count = shard_samples(samples, shard);
        for (std::uint64_t i = 0; i < count; ++i) {
            const double u = uniform(rng);
            auto n = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            n = std::min(n, static_cast<int>(cdf.size()) - 1);
            if (efficiency < 1.0 && n > 0) {
                std::binomial_distribution<int> thin(n, efficiency);
                n = thin(rng);
            }
            ++hist[static_cast<std::size_t>(n)];
        }
        partial[shard] = std::move(hist);
    });

    SampleRun run;
    run.mode_count = np.mode_count();
    run.seed = seed;
    run.sample_count = samples;
    run.efficiency = efficiency;
    for (std::size_t n = 0; n < cdf.size(); ++n) {
        std::uint64_t total = 0;
        for (const auto& h : partial) {
            total += h[n];
        }
        if (total > 0) {
            run.counts[static_cast<int>(n)] = total;
        }
    }
    return run;
}

PhotonDistribution<double> empirical_distribution(const SampleRun& run, int max_photons)
{
    if (run.sample_count == 0 || run.counts.empty()) {
        throw Error(ErrorCode::EmptyRun, "sample run has no samples");
    }
    if (max_photons < 0) {
        throw Error(ErrorCode::InvalidArgument, "max photon number must be non-negative");
    }
    std::uint64_t total = 0;
    for (const auto& [n, count] : run.counts) {
        if (n < 0) {
            throw Error(ErrorCode::InvalidArgument, "negative photon number in histogram");
        }
        total += count;
    }
    if (total != run.sample_count) {
        throw Error(ErrorCode::InvalidArgument,
                    "histogram total " + std::to_string(total) + " differs from sample_count "
                        + std::to_string(run.sample_count));
    }
    PhotonDistribution<double> out;
    out.mode_count = run.mode_count;
    out.sample_count = run.sample_count;
    out.probabilities.assign(static_cast<std::size_t>(max_photons) + 1, 0.0);
    for (const auto& [n, count] : run.counts) {
        if (n <= max_photons) {
            out.probabilities[static_cast<std::size_t>(n)] =
                static_cast<double>(count) / static_cast<double>(run.sample_count);
        }
    }
    return out;
}

}  // namespace gauss_counter
