#pragma once

#include <vector>

#include "gauss_counter/error.hpp"
#include "gauss_counter/photon_distribution.hpp"
#include "gauss_counter/state_model.hpp"

namespace gauss_counter {

struct InverseOptions {
    /// A_k counts as rank deficient when sigma_min / sigma_max < tol_rank.
    /// Exact full-rank ratios reach ~1e-37 for three modes, hence the tiny
    /// default; raise it for noisy input.
    double tol_rank = 1e-60;
    /// Relative distance below which two roots form one double root.
    double tol_root = 1e-5;
    /// Bound on the relative annihilation and weight-model residuals.
    double tol_res = 1e-30;
    /// Largest accepted |imag| / |real| of a root.
    double tol_imag = 1e-6;
    /// Weights down to -tol_weight are accepted as zero.
    double tol_weight = 1e-12;
    /// Width (as a factor on tol_rank) of the band in which a rank decision
    /// is called ambiguous.
    double rank_band = 100.0;
};

/// q0(z) = sum_l g_l z^l with g_0 = 1.
struct MinimalPolynomial {
    std::vector<Real> coefficients;

    int degree() const noexcept { return static_cast<int>(coefficients.size()) - 1; }
};

struct HankelScanEntry {
    int degree = 0;
    /// sigma_min / sigma_max; 0 when A_k has more columns than rows.
    double singular_ratio = 0.0;
};

struct MinimalPolynomialResult {
    MinimalPolynomial polynomial;
    std::vector<HankelScanEntry> scan;
    /// max_j |sum_l g_l f_(j-l+1)| / max|f| over the 4S window rows.
    double annihilation_residual = 0.0;
};

/// Finds the lowest-degree q0 whose coefficients annihilate the shifted
/// windows of f (length 8S). Throws NoKernelFound, RankAmbiguity,
/// NumericalInstability (residual above tol_res), InsufficientData.
MinimalPolynomialResult find_minimal_polynomial(const std::vector<Real>& f, int mode_count,
                                                const InverseOptions& options = {});

struct RootCluster {
    Real lambda_prime;
    int multiplicity = 1;
    /// Largest |imag| / |real| among the member roots.
    double imag_ratio = 0.0;
    /// Relative spread of the members (0 for simple roots).
    double spread = 0.0;
    /// Backward error |P(x)| / sum |g_l| |x|^(k-l) of the reversed polynomial.
    double residual = 0.0;
};

/// Inverse roots lambda' of q0 sorted decreasing, roots closer than
/// `tol_root` (relative) merged into double roots. Throws ComplexRoot,
/// RootOutOfRange, InvalidRootMultiplicity.
std::vector<RootCluster> roots_with_multiplicity(const MinimalPolynomial& q,
                                                 const InverseOptions& options = {});

struct WeightSolution {
    /// m_k = 2 omega_k, unrounded.
    std::vector<Real> multiplicities;
    /// c'_k lambda'_k^2 = (c_k / (1 + lambda_k))^2; zero for simple roots.
    std::vector<Real> displacement_weights;
    /// ||f_model - f|| / ||f|| over every supplied f_n, not only the square
    /// block that was solved.
    double residual = 0.0;
};

/// Solves the Hermite interpolation system for the weights. Throws
/// IllConditioned, NegativeWeight, InsufficientData.
WeightSolution solve_weights(const std::vector<Real>& f, const std::vector<RootCluster>& roots,
                             const InverseOptions& options = {});

struct InversionReport {
    int mode_count = 0;
    NormalParameters parameters;
    std::vector<HankelScanEntry> hankel_scan;
    MinimalPolynomial polynomial;
    double annihilation_residual = 0.0;
    std::vector<RootCluster> roots;
    double weight_residual = 0.0;
    std::vector<double> multiplicities_raw;
    /// |m_raw - m| per eigenvalue after integerization.
    std::vector<double> rounding_deltas;
    /// Number of root-clustering alternatives that were tried.
    int clustering_candidates = 0;
};

/// Error raised by `invert_distribution`, with whatever diagnostics were
/// gathered before the failing stage.
class InversionError : public Error {
public:
    InversionError(const Error& cause, InversionReport partial)
        : Error(cause), partial_(std::move(partial))
    {
    }

    const InversionReport& partial_report() const noexcept { return partial_; }

private:
    InversionReport partial_;
};

/// Recovers the normal parameters from p_0..p_8S (later entries are ignored).
/// Throws InversionError labelled with the failing stage.
InversionReport invert_distribution(const PhotonDistribution<Real>& p,
                                    const InverseOptions& options = {});

InversionReport invert_distribution(const PhotonDistribution<double>& p,
                                    const InverseOptions& options = {});

}  // namespace gauss_counter
