#pragma once

#include <vector>

#include <Eigen/Core>

#include "gauss_counter/precision.hpp"

namespace gauss_counter {

/// An S-mode Gaussian state given by its optical covariance matrix and
/// displacement, in quadrature order (q1, p1, q2, p2, ...). Vacuum has
/// covariance = identity.
struct GaussianStateSpec {
    int mode_count = 0;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd displacement;
};

enum class ValidationMode { mathematical, physical };

inline constexpr double tol_symmetry = 1e-10;
inline constexpr double tol_symplectic = 1e-9;
inline constexpr double default_tol_distinct = 1e-8;

struct ValidationReport {
    double symmetry_defect = 0.0;
    double min_eigenvalue = 0.0;
    double min_symplectic_eigenvalue = 0.0;
    bool symmetric = false;
    bool positive_definite = false;
    bool physical = false;
    bool passed = false;
};

/// Checks the covariance invariants. Returns the report on success and throws
/// `Error` (DimensionMismatch, NotSymmetric, NotPositiveDefinite, Unphysical)
/// when the state fails under `mode`.
ValidationReport validate_state(const GaussianStateSpec& spec, ValidationMode mode);

/// Same measurements as `validate_state` but never throws on a failed check.
ValidationReport inspect_state(const GaussianStateSpec& spec);

/// Symplectic eigenvalues of a 2S x 2S covariance matrix, ascending.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& covariance);

/// Distinct covariance eigenvalues (strictly decreasing), their
/// multiplicities and the norm of the displacement inside each eigenspace.
/// Everything the total photon counter can see.
struct NormalParameters {
    std::vector<double> eigenvalues;
    std::vector<int> multiplicities;
    std::vector<double> displacement_norms;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    /// Sum of multiplicities divided by two.
    int mode_count() const;
    /// Eigenspaces with nonzero displacement.
    std::size_t displaced_count() const;
};

/// Throws InvalidArgument unless `np` satisfies the NormalParameters
/// invariants (ordering, gaps, positive multiplicities with even sum, c >= 0).
void validate_normal_parameters(const NormalParameters& np,
                                double tol_distinct = default_tol_distinct);

/// lambda' = lambda / (1 + lambda) and c' = (c / lambda)^2, in which the
/// cumulant sequence becomes a sum of geometric terms.
template <typename T>
struct ModifiedNormalParameters {
    std::vector<T> lambda_prime;
    std::vector<T> c_prime;
    std::vector<int> multiplicities;

    std::size_t size() const noexcept { return lambda_prime.size(); }
};

template <typename T>
ModifiedNormalParameters<T> to_modified(const NormalParameters& np);

/// Inverse of `to_modified`. Throws LambdaPrimeOutOfRange when some
/// lambda' is outside (0, 1), InvalidArgument for negative c'.
template <typename T>
NormalParameters from_modified(const ModifiedNormalParameters<T>& mp);

/// Diagonalizes the covariance, clusters eigenvalues whose relative gap is at
/// most `tol_distinct` and projects the displacement onto each cluster.
NormalParameters extract_normal_parameters(const GaussianStateSpec& spec,
                                           double tol_distinct = default_tol_distinct);

/// Full 2S-entry covariance spectrum in non-increasing order.
std::vector<double> expand_spectrum(const NormalParameters& np);

struct CanonicalParameters {
    std::vector<double> thermal;
    std::vector<double> squeezing;
};

/// Pairs the k-th largest with the k-th smallest spectrum entry:
/// tau_k = sqrt(g_k g_{2S+1-k}), xi_k = log(g_k / g_{2S+1-k}) / 4, so that a
/// squeezer diag(e^xi, e^-xi) on vacuum reads back as xi.
CanonicalParameters canonical_parameters(const std::vector<double>& spectrum);

/// True when the spectrum admits a physical state: every canonical thermal
/// parameter is at least 1 - tol_symplectic.
bool is_physical_spectrum(const NormalParameters& np);

/// Builds the diagonal-form state (covariance diag(spectrum), one displaced
/// coordinate per eigenspace) that has the given normal parameters.
GaussianStateSpec canonical_state(const NormalParameters& np);

}  // namespace gauss_counter
