#include "gauss_counter/state_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gauss_counter/error.hpp"

namespace gauss_counter {

namespace {

void check_dimensions(const GaussianStateSpec& spec)
{
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(spec.mode_count);
    if (spec.mode_count <= 0 || spec.covariance.rows() != dim || spec.covariance.cols() != dim
        || spec.displacement.size() != dim) {
        std::ostringstream msg;
        msg << "mode_count " << spec.mode_count << " needs a " << dim << "x" << dim
            << " covariance and length-" << dim << " displacement, got "
            << spec.covariance.rows() << "x" << spec.covariance.cols() << " and "
            << spec.displacement.size();
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    if (!spec.covariance.allFinite() || !spec.displacement.allFinite()) {
        throw Error(ErrorCode::NonFiniteInput, "state contains non-finite entries");
    }
}

Eigen::MatrixXd symplectic_form(Eigen::Index modes)
{
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (Eigen::Index k = 0; k < modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

}  // namespace

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& covariance)
{
    const Eigen::Index dim = covariance.rows();
    const Eigen::Index modes = dim / 2;
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "covariance has no Cholesky factor");
    }
    // L^T Omega L is antisymmetric with eigenvalues +-i nu_k; its Gram matrix
    // has each nu_k^2 twice.
    const Eigen::MatrixXd l = llt.matrixL();
    const Eigen::MatrixXd a = l.transpose() * symplectic_form(modes) * l;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.transpose() * a, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd squares = solver.eigenvalues();
    Eigen::VectorXd nu(modes);
    for (Eigen::Index k = 0; k < modes; ++k) {
        const double pair = 0.5 * (squares(2 * k) + squares(2 * k + 1));
        nu(k) = std::sqrt(std::max(pair, 0.0));
    }
    return nu;
}

ValidationReport inspect_state(const GaussianStateSpec& spec)
{
    check_dimensions(spec);
    ValidationReport report;
    const Eigen::MatrixXd& g = spec.covariance;
    report.symmetry_defect = (g - g.transpose()).cwiseAbs().maxCoeff();
    report.symmetric = report.symmetry_defect <= tol_symmetry;

    const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.positive_definite = report.min_eigenvalue > 0.0;

    report.min_symplectic_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    if (report.positive_definite) {
        report.min_symplectic_eigenvalue = symplectic_eigenvalues(sym).minCoeff();
    }
    report.physical = report.positive_definite
                      && report.min_symplectic_eigenvalue >= 1.0 - tol_symplectic;
    return report;
}

ValidationReport validate_state(const GaussianStateSpec& spec, ValidationMode mode)
{
    ValidationReport report = inspect_state(spec);
    if (!report.symmetric) {
        std::ostringstream msg;
        msg << "covariance symmetry defect " << report.symmetry_defect << " exceeds "
            << tol_symmetry;
        throw Error(ErrorCode::NotSymmetric, msg.str());
    }
    if (!report.positive_definite) {
        std::ostringstream msg;
        msg << "covariance minimum eigenvalue " << report.min_eigenvalue << " is not positive";
        throw Error(ErrorCode::NotPositiveDefinite, msg.str());
    }
    if (mode == ValidationMode::physical && !report.physical) {
        std::ostringstream msg;
        msg << "minimum symplectic eigenvalue " << report.min_symplectic_eigenvalue
            << " violates the uncertainty principle";
        throw Error(ErrorCode::Unphysical, msg.str());
    }
    report.passed = true;
    return report;
}

int NormalParameters::mode_count() const
{
    return std::accumulate(multiplicities.begin(), multiplicities.end(), 0) / 2;
}

std::size_t NormalParameters::displaced_count() const
{
    return static_cast<std::size_t>(
        std::count_if(displacement_norms.begin(), displacement_norms.end(),
                      [](double c) { return c != 0.0; }));
}

void validate_normal_parameters(const NormalParameters& np, double tol_distinct)
{
    const std::size_t h = np.eigenvalues.size();
    if (h == 0 || np.multiplicities.size() != h || np.displacement_norms.size() != h) {
        throw Error(ErrorCode::DimensionMismatch,
                    "eigenvalues, multiplicities and displacement_norms must be non-empty "
                    "and of equal length");
    }
    int total = 0;
    for (std::size_t k = 0; k < h; ++k) {
        const double lambda = np.eigenvalues[k];
        const double c = np.displacement_norms[k];
        if (!std::isfinite(lambda) || !std::isfinite(c)) {
            throw Error(ErrorCode::NonFiniteInput, "normal parameters contain non-finite values");
        }
        if (lambda <= 0.0) {
            throw Error(ErrorCode::InvalidArgument, "eigenvalues must be positive");
        }
        if (c < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "displacement norms must be non-negative");
        }
        if (np.multiplicities[k] <= 0) {
            throw Error(ErrorCode::InvalidArgument, "multiplicities must be positive");
        }
        if (k > 0) {
            const double prev = np.eigenvalues[k - 1];
            if ((prev - lambda) / prev <= tol_distinct) {
                throw Error(ErrorCode::InvalidArgument,
                            "eigenvalues must be strictly decreasing with relative gaps above "
                            "tol_distinct");
            }
        }
        total += np.multiplicities[k];
    }
    if (total % 2 != 0) {
        throw Error(ErrorCode::OddLength, "multiplicities must sum to an even number 2S");
    }
}

template <typename T>
ModifiedNormalParameters<T> to_modified(const NormalParameters& np)
{
    validate_normal_parameters(np);
    ModifiedNormalParameters<T> mp;
    mp.multiplicities = np.multiplicities;
    for (std::size_t k = 0; k < np.size(); ++k) {
        const T lambda(np.eigenvalues[k]);
        const T c(np.displacement_norms[k]);
        mp.lambda_prime.push_back(lambda / (T(1) + lambda));
        const T ratio = c / lambda;
        mp.c_prime.push_back(ratio * ratio);
    }
    return mp;
}

template <typename T>
NormalParameters from_modified(const ModifiedNormalParameters<T>& mp)
{
    using std::sqrt;
    const std::size_t h = mp.lambda_prime.size();
    if (mp.c_prime.size() != h || mp.multiplicities.size() != h) {
        throw Error(ErrorCode::DimensionMismatch, "modified parameter vectors differ in length");
    }
    NormalParameters np;
    np.multiplicities = mp.multiplicities;
    for (std::size_t k = 0; k < h; ++k) {
        const T& lp = mp.lambda_prime[k];
        if (!is_finite(lp) || !(lp > T(0)) || !(lp < T(1))) {
            throw Error(ErrorCode::LambdaPrimeOutOfRange,
                        "lambda' = " + to_decimal(to_double(lp)) + " is outside (0, 1)");
        }
        if (!is_finite(mp.c_prime[k]) || mp.c_prime[k] < T(0)) {
            throw Error(ErrorCode::InvalidArgument, "c' must be finite and non-negative");
        }
        const T lambda = lp / (T(1) - lp);
        np.eigenvalues.push_back(to_double(lambda));
        np.displacement_norms.push_back(to_double(lambda * sqrt(mp.c_prime[k])));
    }
    return np;
}

template ModifiedNormalParameters<double> to_modified<double>(const NormalParameters&);
template ModifiedNormalParameters<Real> to_modified<Real>(const NormalParameters&);
template NormalParameters from_modified<double>(const ModifiedNormalParameters<double>&);
template NormalParameters from_modified<Real>(const ModifiedNormalParameters<Real>&);

NormalParameters extract_normal_parameters(const GaussianStateSpec& spec, double tol_distinct)
{
    validate_state(spec, ValidationMode::mathematical);
    const Eigen::MatrixXd sym = 0.5 * (spec.covariance + spec.covariance.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalInstability, "symmetric eigensolver did not converge");
    }
    const Eigen::VectorXd values = solver.eigenvalues();
    const Eigen::MatrixXd vectors = solver.eigenvectors();
    const double residual = (sym * vectors - vectors * values.asDiagonal()).norm();
    if (residual > 1e-10 * sym.norm()) {
        throw Error(ErrorCode::NumericalInstability, "eigendecomposition residual too large");
    }

    // Eigen sorts ascending; walk from the top.
    const Eigen::Index dim = values.size();
    std::vector<std::vector<Eigen::Index>> clusters;
    for (Eigen::Index i = dim - 1; i >= 0; --i) {
        if (!clusters.empty()) {
            const double upper = values(clusters.back().back());
            const double gap = (upper - values(i)) / upper;
            if (gap > 0.5 * tol_distinct && gap <= 2.0 * tol_distinct) {
                std::ostringstream msg;
                msg << "relative eigenvalue gap " << gap << " is within a factor 2 of tol_distinct "
                    << tol_distinct;
                throw Error(ErrorCode::ClusterAmbiguity, msg.str());
            }
            if (gap <= tol_distinct) {
                clusters.back().push_back(i);
                continue;
            }
        }
        clusters.push_back({i});
    }

    NormalParameters np;
    const Eigen::VectorXd projected = vectors.transpose() * spec.displacement;
    for (const auto& cluster : clusters) {
        double sum = 0.0;
        double norm2 = 0.0;
        for (Eigen::Index i : cluster) {
            sum += values(i);
            norm2 += projected(i) * projected(i);
        }
        np.eigenvalues.push_back(sum / static_cast<double>(cluster.size()));
        np.multiplicities.push_back(static_cast<int>(cluster.size()));
        np.displacement_norms.push_back(std::sqrt(norm2));
    }
    return np;
}

std::vector<double> expand_spectrum(const NormalParameters& np)
{
    std::vector<double> spectrum;
    for (std::size_t k = 0; k < np.size(); ++k) {
        spectrum.insert(spectrum.end(), static_cast<std::size_t>(np.multiplicities[k]),
                        np.eigenvalues[k]);
    }
    std::sort(spectrum.begin(), spectrum.end(), std::greater<>());
    return spectrum;
}

CanonicalParameters canonical_parameters(const std::vector<double>& spectrum)
{
    if (spectrum.size() % 2 != 0 || spectrum.empty()) {
        throw Error(ErrorCode::OddLength, "spectrum length must be a positive even number");
    }
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        if (!(spectrum[k] > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "spectrum entries must be positive");
        }
        if (k > 0 && spectrum[k] > spectrum[k - 1]) {
            throw Error(ErrorCode::InvalidArgument, "spectrum must be sorted non-increasing");
        }
    }
    const std::size_t modes = spectrum.size() / 2;
    CanonicalParameters out;
    for (std::size_t k = 0; k < modes; ++k) {
        const double hi = spectrum[k];
        const double lo = spectrum[spectrum.size() - 1 - k];
        out.thermal.push_back(std::sqrt(hi * lo));
        out.squeezing.push_back(0.25 * std::log(hi / lo));
    }
    return out;
}

bool is_physical_spectrum(const NormalParameters& np)
{
    const auto canonical = canonical_parameters(expand_spectrum(np));
    return std::all_of(canonical.thermal.begin(), canonical.thermal.end(),
                       [](double tau) { return tau >= 1.0 - tol_symplectic; });
}

GaussianStateSpec canonical_state(const NormalParameters& np)
{
    validate_normal_parameters(np);
    GaussianStateSpec spec;
    spec.mode_count = np.mode_count();
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(spec.mode_count);
    spec.covariance = Eigen::MatrixXd::Zero(dim, dim);
    spec.displacement = Eigen::VectorXd::Zero(dim);
    Eigen::Index offset = 0;
    for (std::size_t k = 0; k < np.size(); ++k) {
        spec.displacement(offset) = np.displacement_norms[k];
        for (int j = 0; j < np.multiplicities[k]; ++j, ++offset) {
            spec.covariance(offset, offset) = np.eigenvalues[k];
        }
    }
    return spec;
}

}  // namespace gauss_counter
