#pragma once

#include <vector>

#include "gauss_counter/photon_distribution.hpp"
#include "gauss_counter/precision.hpp"

namespace gauss_counter {

/// Polynomial part of the Wigner function of the n-photon projector on S
/// modes: W_n(r) = exp(-r^2) P_n(r^2), with
///
///   P_n(x) = (-1)^n / pi^S * sum_l (-2x)^l C(n+S-1, l+S-1) / l!
///
/// Coefficients are stored in the monomial basis, `coefficients[l]`
/// multiplying x^l.
template <typename T>
struct ProjectorPolynomial {
    int mode_count = 0;
    int photon_number = 0;
    std::vector<T> coefficients;

    /// Horner evaluation at x = r^2.
    T operator()(const T& x) const;
};

/// Throws Overflow if a coefficient does not fit in T.
template <typename T>
ProjectorPolynomial<T> projector_polynomial(int mode_count, int photon_number);

/// Affine map between moments of r^2 under the tilted Wigner density and the
/// relative probabilities: p_k / p_0 = offset_k + sum_{l<=k} matrix_kl mu_l,
/// for k = 1..size. Row/column index 0 of `matrix` is k = 1.
template <typename T>
struct MomentProbabilityMap {
    int mode_count = 0;
    int size = 0;
    Mat<T> matrix;
    Vec<T> offset;
};

template <typename T>
MomentProbabilityMap<T> moment_probability_map(int mode_count, int size);

/// mu_1..mu_n from p_0..p_n by triangular forward substitution. Computed in
/// the scaled basis 2^l mu_l / l!, where the map has unit diagonal.
/// Throws ZeroP0, NonFiniteInput, InsufficientData.
template <typename T>
std::vector<T> probabilities_to_moments(const PhotonDistribution<T>& p, int n);

/// p_k / p_0 for k = 1..mu.size() given raw moments (inverse of the above).
template <typename T>
std::vector<T> moments_to_relative_probabilities(const std::vector<T>& mu, int mode_count);

/// Scaled-basis versions used by the forward and inverse chains. The scaled
/// moment is s_l = 2^l mu_l / l!; entries stay O(1) where raw moments grow
/// factorially.
template <typename T>
std::vector<T> relative_to_scaled_moments(const std::vector<T>& relative, int mode_count);

template <typename T>
std::vector<T> scaled_moments_to_relative(const std::vector<T>& scaled, int mode_count);

/// Relative probabilities p_1/p_0..p_n/p_0 with input checks.
template <typename T>
std::vector<T> relative_probabilities(const PhotonDistribution<T>& p, int n);

}  // namespace gauss_counter
