#pragma once

#include <cstdint>
#include <vector>

#include "gauss_counter/inverse_engine.hpp"
#include "gauss_counter/oracle_sampler.hpp"
#include "gauss_counter/state_model.hpp"

namespace gauss_counter {

/// Fixed model structure: one entry per distinct eigenvalue, in decreasing
/// eigenvalue order.
struct StructureHypothesis {
    std::vector<int> multiplicities;
    /// Whether the displacement of each eigenspace is a free parameter (it is
    /// pinned to 0 otherwise).
    std::vector<bool> displaced;
};

struct FitConfig {
    int mode_count = 1;
    /// Highest bin of the likelihood; counts above it share the overflow bin.
    /// Negative means max(8S, largest observed photon number).
    int max_photons = -1;
    StructureHypothesis structure;
    double lambda_min = 1.0;
    double lambda_max = 20.0;
    double c_max = 5.0;
    /// Only parameter sets that admit a physical state are feasible.
    bool physical_only = true;
    int restarts = 8;
    int max_iterations = 2000;
    /// Simplex size at which a restart counts as converged.
    double simplex_tolerance = 1e-9;
    std::uint64_t seed = 0;
    /// Seed restart 0 from the exact inversion of the empirical frequencies
    /// when it succeeds with `inverse_options` and matches the structure.
    bool seed_from_inversion = true;
    InverseOptions inverse_options;
};

struct RestartTrace {
    int index = 0;
    bool from_inversion = false;
    NormalParameters start;
    NormalParameters result;
    double negative_log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct FitResult {
    NormalParameters parameters;
    double negative_log_likelihood = 0.0;
    std::vector<RestartTrace> restarts;
    /// Best NLL after each restart, in restart order (non-increasing).
    std::vector<double> best_so_far;
    /// True when the winning restart met the simplex tolerance.
    bool converged = false;
};

/// Throws StructureMismatch or InvalidArgument for an unusable config.
void validate_fit_config(const FitConfig& config);

/// Multinomial negative log-likelihood, without the parameter-free
/// combinatorial term, of the run's counts in bins 0..max_photons plus one
/// overflow bin. The model includes the run's detector efficiency. Returns
/// +infinity for infeasible parameters.
double negative_log_likelihood(const NormalParameters& np, const SampleRun& run,
                               const FitConfig& config);

/// Likelihood value at the empirical frequencies, the lower bound of the NLL.
double multinomial_entropy_bound(const SampleRun& run, const FitConfig& config);

/// Nelder-Mead (GSL nmsimplex2) from several restarts over a smooth box
/// parameterization: with s(u) = (1 - cos u)/2, the smallest eigenvalue is
/// lambda_min + (lambda_max - lambda_min) s(u), each larger one is
/// a + (lambda_max - a) s(u) with a just above its lower neighbour, and each
/// free displacement is c_max s(v). Restarts run in parallel; the lowest NLL
/// wins, ties going to the lowest restart index.
FitResult fit(const SampleRun& run, const FitConfig& config);

}  // namespace gauss_counter
