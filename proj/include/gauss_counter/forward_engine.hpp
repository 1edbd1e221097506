#pragma once

#include <vector>

#include "gauss_counter/photon_distribution.hpp"
#include "gauss_counter/state_model.hpp"

namespace gauss_counter {

/// f_n = sum_k (m_k/2) lambda'_k^n + n c'_k lambda'_k^(n+1), n = 1..n_max.
template <typename T>
std::vector<T> f_from_parameters(const ModifiedNormalParameters<T>& mp, int n_max);

/// Vacuum probability prod_k (2/(lambda_k+1))^(m_k/2) exp(-c_k^2/(lambda_k+1)).
template <typename T>
T p0_from_parameters(const NormalParameters& np);

struct PhotonNumberMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of the total photon number.
PhotonNumberMoments photon_number_moments(const NormalParameters& np);

inline constexpr double tail_mass_target = 1e-9;
inline constexpr int max_tail_photons = 1 << 16;

/// Truncation point: at least max(8S, ceil(mean + 10 sd)), extended for
/// physical spectra until the missing mass is at most tail_mass_target.
int tail_photon_bound(const NormalParameters& np);

enum class ForwardMethod {
    /// f -> scaled moments -> probabilities, the algebra the inversion
    /// reverses. The alternating binomial sums lose about N log10(3) digits,
    /// so in double it is reliable only for small N.
    cumulant_chain,
    /// Power series of the closed-form probability generating function,
    /// prod_j (1 - b_j z)^(-1/2) exp(...) over covariance eigen-coordinates
    /// with b_j = (g_j - 1)/(g_j + 1). No cancellation; use in double.
    generating_function,
};

/// p_0..p_N. For parameter sets that admit a physical state the output is
/// checked: entries in [-1e-12, 0) are clamped to 0 with a warning, anything
/// more negative or a total above 1 + 1e-9 raises NumericalInstability.
/// Unphysical (mathematical) parameter sets return the unclamped values of
/// the same formulas.
template <typename T>
PhotonDistribution<T> forward_distribution(const NormalParameters& np, int max_photons,
                                           ForwardMethod method = ForwardMethod::cumulant_chain);

template <typename T>
PhotonDistribution<T> forward_from_spec(const GaussianStateSpec& spec, int max_photons,
                                        ForwardMethod method = ForwardMethod::cumulant_chain,
                                        double tol_distinct = default_tol_distinct);

}  // namespace gauss_counter
