#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gauss_counter/photon_distribution.hpp"
#include "gauss_counter/state_model.hpp"

namespace gauss_counter {

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Estimates p_n as the mean of (2 pi)^S W_n(r) over r drawn from the state's
/// Wigner density (mean d, covariance Gamma / 2). The projector kernel is
/// evaluated through the Laguerre three-term recurrence,
/// (2 pi)^S W_n(r) = 2^S (-1)^n exp(-r^2) L_n^(S-1)(2 r^2).
/// Deterministic for a given seed regardless of the worker count.
MonteCarloEstimate mc_probability(const GaussianStateSpec& spec, int photon_number,
                                  std::uint64_t samples, std::uint64_t seed);

/// Estimates for n = 0..max_photons from one shared set of draws.
std::vector<MonteCarloEstimate> mc_probabilities(const GaussianStateSpec& spec, int max_photons,
                                                 std::uint64_t samples, std::uint64_t seed);

/// Simulated photon-counting experiment.
struct SampleRun {
    int mode_count = 0;
    std::uint64_t seed = 0;
    std::uint64_t sample_count = 0;
    double efficiency = 1.0;
    std::map<int, std::uint64_t> counts;
};

/// Draws total photon numbers from the exact distribution (truncated at the
/// tail bound, remaining mass in the last bin) and keeps each photon with
/// probability `efficiency`. Uses std::mt19937_64 with the standard library
/// distributions, so runs are bit-identical for a given toolchain.
SampleRun sample_counts(const NormalParameters& np, std::uint64_t samples, double efficiency,
                        std::uint64_t seed);

/// Relative frequencies of n = 0..max_photons. Throws EmptyRun.
PhotonDistribution<double> empirical_distribution(const SampleRun& run, int max_photons);

/// Normal parameters after a pure-loss channel of transmissivity
/// `efficiency` on every mode: lambda -> eta lambda + 1 - eta, c -> sqrt(eta) c.
/// Its photon-number law is the binomial thinning of the original one.
NormalParameters apply_uniform_loss(const NormalParameters& np, double efficiency);

/// Laguerre polynomial L_n^(alpha)(y) for n = 0..max_n.
std::vector<double> laguerre_sequence(int max_n, double alpha, double y);

}  // namespace gauss_counter
