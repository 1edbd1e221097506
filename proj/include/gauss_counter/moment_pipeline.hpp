#pragma once

#include <vector>

#include "gauss_counter/photon_distribution.hpp"

namespace gauss_counter {

// Moments mu_n of r^2 under the tilted density W' (mu_0 = 1 implied), raw
// cumulants kappa_n, and the normalized coefficients f_n = kappa_n / (n-1)!,
// which are the Taylor coefficients of the log-derivative of the moment
// generating function: l(z) = sum_n f_n z^(n-1).

/// Raw cumulants through the binomial moment recursion.
template <typename T>
std::vector<T> moments_to_cumulants(const std::vector<T>& mu);

/// f_n = kappa_n / (n-1)! from raw moments. Throws NonFiniteInput.
template <typename T>
std::vector<T> moments_to_f(const std::vector<T>& mu);

/// Exact inverse of `moments_to_f`.
template <typename T>
std::vector<T> f_to_moments(const std::vector<T>& f);

/// Same conversions on scaled moments s_n = 2^n mu_n / n!. Uses
/// n nu_n = sum_{k=1}^n f_k nu_{n-k} with nu_n = mu_n / n! = s_n / 2^n, which
/// avoids factorials altogether.
template <typename T>
std::vector<T> scaled_moments_to_f(const std::vector<T>& scaled);

template <typename T>
std::vector<T> f_to_scaled_moments(const std::vector<T>& f);

/// f_1..f_n from p_0..p_n (n defaults to the full distribution length - 1).
template <typename T>
std::vector<T> probabilities_to_f(const PhotonDistribution<T>& p, int n = -1);

}  // namespace gauss_counter
