#include "gauss_counter/inverse_engine.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "gauss_counter/moment_pipeline.hpp"

namespace gauss_counter {

namespace {

using Complex = std::complex<Real>;

std::string format_double(double x)
{
    std::ostringstream out;
    out << x;
    return out.str();
}

Real max_abs(const std::vector<Real>& v)
{
    Real m(0);
    for (const Real& x : v) {
        m = std::max(m, Real(abs(x)));
    }
    return m;
}

// Rows j = 4S..8S-1 (1-based), columns l = 0..k: f_(j+1-l).
Mat<Real> hankel_window(const std::vector<Real>& f, int mode_count, int k)
{
    const int rows = 4 * mode_count;
    Mat<Real> a(rows, k + 1);
    for (int r = 0; r < rows; ++r) {
        const int j = 4 * mode_count + r;
        for (int l = 0; l <= k; ++l) {
            a(r, l) = f[static_cast<std::size_t>(j - l)];
        }
    }
    return a;
}

double annihilation_residual(const std::vector<Real>& f, int mode_count,
                             const MinimalPolynomial& q)
{
    const Mat<Real> a = hankel_window(f, mode_count, q.degree());
    Vec<Real> g(q.degree() + 1);
    for (int l = 0; l <= q.degree(); ++l) {
        g(l) = q.coefficients[static_cast<std::size_t>(l)];
    }
    const Real scale = max_abs(f);
    const Vec<Real> r = a * g;
    return to_double(r.cwiseAbs().maxCoeff() / scale);
}

std::vector<Complex> reversed_polynomial_roots(const MinimalPolynomial& q)
{
    const int k = q.degree();
    Mat<Real> companion = Mat<Real>::Zero(k, k);
    for (int j = 0; j < k; ++j) {
        companion(0, j) = -q.coefficients[static_cast<std::size_t>(j) + 1];
    }
    for (int i = 1; i < k; ++i) {
        companion(i, i - 1) = Real(1);
    }
    Eigen::EigenSolver<Mat<Real>> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalInstability, "companion eigensolver did not converge");
    }
    std::vector<Complex> roots;
    for (int i = 0; i < k; ++i) {
        roots.push_back(solver.eigenvalues()(i));
    }
    std::sort(roots.begin(), roots.end(),
              [](const Complex& a, const Complex& b) { return a.real() > b.real(); });
    return roots;
}

double backward_error(const MinimalPolynomial& q, const Real& x)
{
    Real value(0);
    Real magnitude(0);
    const Real ax = abs(x);
    for (const Real& g : q.coefficients) {
        value = value * x + g;
        magnitude = magnitude * ax + abs(g);
    }
    return to_double(abs(value) / magnitude);
}

std::vector<RootCluster> cluster_roots(const MinimalPolynomial& q,
                                       const std::vector<Complex>& roots, double tol_root,
                                       double tol_imag)
{
    std::vector<std::vector<Complex>> groups;
    for (const Complex& z : roots) {
        if (!groups.empty()) {
            const Complex& prev = groups.back().back();
            const Real scale = std::max(abs(prev), abs(z));
            if (abs(prev - z) / scale <= Real(tol_root)) {
                groups.back().push_back(z);
                continue;
            }
        }
        groups.push_back({z});
    }

    std::vector<RootCluster> clusters;
    for (const auto& group : groups) {
        if (group.size() > 2) {
            throw Error(ErrorCode::InvalidRootMultiplicity,
                        std::to_string(group.size()) + " roots coincide near lambda' = "
                            + format_double(to_double(group.front().real())));
        }
        RootCluster c;
        c.multiplicity = static_cast<int>(group.size());
        Real sum(0);
        for (const Complex& z : group) {
            sum += z.real();
            const double ratio = to_double(abs(z.imag()) / abs(z));
            c.imag_ratio = std::max(c.imag_ratio, ratio);
        }
        c.lambda_prime = sum / Real(c.multiplicity);
        if (group.size() == 2) {
            c.spread = to_double(abs(group[0] - group[1]) / abs(c.lambda_prime));
        }
        c.residual = backward_error(q, c.lambda_prime);
        if (c.imag_ratio > tol_imag) {
            throw Error(ErrorCode::ComplexRoot,
                        "root with |imag|/|real| = " + format_double(c.imag_ratio));
        }
        if (!(c.lambda_prime > Real(0)) || !(c.lambda_prime < Real(1))) {
            throw Error(ErrorCode::RootOutOfRange,
                        "lambda' = " + format_double(to_double(c.lambda_prime))
                            + " is outside (0, 1)");
        }
        clusters.push_back(c);
    }
    return clusters;
}

// Columns: lambda'_k^n for every root, then n lambda'_s^(n-1) for double roots.
Mat<Real> hermite_matrix(const std::vector<RootCluster>& roots, int rows)
{
    std::vector<std::size_t> doubles;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        if (roots[k].multiplicity == 2) {
            doubles.push_back(k);
        }
    }
    const Eigen::Index cols = static_cast<Eigen::Index>(roots.size() + doubles.size());
    Mat<Real> z(rows, cols);
    for (std::size_t k = 0; k < roots.size(); ++k) {
        Real power(1);
        for (int n = 1; n <= rows; ++n) {
            power *= roots[k].lambda_prime;
            z(n - 1, static_cast<Eigen::Index>(k)) = power;
        }
    }
    for (std::size_t j = 0; j < doubles.size(); ++j) {
        const Real& x = roots[doubles[j]].lambda_prime;
        Real power(1);  // x^(n-1)
        for (int n = 1; n <= rows; ++n) {
            z(n - 1, static_cast<Eigen::Index>(roots.size() + j)) = Real(n) * power;
            power *= x;
        }
    }
    return z;
}

WeightSolution fit_weights(const std::vector<Real>& f, const std::vector<RootCluster>& roots)
{
    const int rows = static_cast<int>(f.size());
    const Mat<Real> z_full = hermite_matrix(roots, rows);
    const Eigen::Index size = z_full.cols();
    if (size > rows) {
        throw Error(ErrorCode::InsufficientData, "fewer cumulants than unknown weights");
    }
    Vec<Real> rhs(rows);
    for (int n = 0; n < rows; ++n) {
        rhs(n) = f[static_cast<std::size_t>(n)];
    }
    const Mat<Real> z = z_full.topRows(size);
    const Vec<Real> omega = z.fullPivLu().solve(rhs.head(size));

    WeightSolution out;
    out.residual = to_double((z_full * omega - rhs).norm() / rhs.norm());
    std::size_t next_double = roots.size();
    for (std::size_t k = 0; k < roots.size(); ++k) {
        out.multiplicities.push_back(Real(2) * omega(static_cast<Eigen::Index>(k)));
        if (roots[k].multiplicity == 2) {
            out.displacement_weights.push_back(omega(static_cast<Eigen::Index>(next_double++)));
        } else {
            out.displacement_weights.push_back(Real(0));
        }
    }
    return out;
}

void check_weights(const WeightSolution& w, const InverseOptions& options)
{
    if (!(w.residual <= options.tol_res)) {
        throw Error(ErrorCode::IllConditioned,
                    "weight model residual " + format_double(w.residual) + " exceeds tol_res "
                        + format_double(options.tol_res));
    }
    for (std::size_t k = 0; k < w.multiplicities.size(); ++k) {
        if (w.multiplicities[k] < Real(-options.tol_weight)
            || w.displacement_weights[k] < Real(-options.tol_weight)) {
            throw Error(ErrorCode::NegativeWeight,
                        "negative weight for eigenvalue " + std::to_string(k + 1));
        }
    }
}

// Nearest integers, each within 0.25; then, if the total is off, move the
// entries with the most slack towards their raw values' other side.
std::vector<int> integer_multiplicities(const std::vector<double>& raw, int mode_count)
{
    std::vector<int> m;
    for (double x : raw) {
        const double r = std::round(x);
        if (std::abs(x - r) > 0.25) {
            throw Error(ErrorCode::MultiplicityRoundingFailed,
                        "multiplicity " + format_double(x) + " is not close to an integer");
        }
        m.push_back(static_cast<int>(r));
    }
    int total = 0;
    for (int v : m) {
        total += v;
    }
    while (total != 2 * mode_count) {
        const int step = total > 2 * mode_count ? -1 : 1;
        std::size_t best = m.size();
        double best_slack = -1e300;
        for (std::size_t k = 0; k < m.size(); ++k) {
            const double slack = step * (raw[k] - m[k]);
            if (m[k] + step >= 1 && slack > best_slack) {
                best = k;
                best_slack = slack;
            }
        }
        if (best == m.size()) {
            throw Error(ErrorCode::MultiplicityRoundingFailed,
                        "cannot make the multiplicities sum to " + std::to_string(2 * mode_count));
        }
        m[best] += step;
        total += step;
    }
    for (int v : m) {
        if (v < 1) {
            throw Error(ErrorCode::MultiplicityRoundingFailed,
                        "a recovered eigenvalue has multiplicity below 1");
        }
    }
    return m;
}

template <typename F>
auto staged(const char* stage, F&& body) -> decltype(body())
{
    try {
        return body();
    } catch (const Error& e) {
        throw e.with_stage(stage);
    }
}

}  // namespace

MinimalPolynomialResult find_minimal_polynomial(const std::vector<Real>& f, int mode_count,
                                                const InverseOptions& options)
{
    if (mode_count < 1) {
        throw Error(ErrorCode::InvalidArgument, "mode count must be positive");
    }
    const int max_degree = 4 * mode_count;
    if (static_cast<int>(f.size()) < 2 * max_degree) {
        throw Error(ErrorCode::InsufficientData,
                    "need f_1..f_" + std::to_string(2 * max_degree) + ", got "
                        + std::to_string(f.size()));
    }
    for (const Real& x : f) {
        if (!is_finite(x)) {
            throw Error(ErrorCode::NonFiniteInput, "cumulant vector has non-finite entries");
        }
    }
    const double band_low = options.tol_rank / options.rank_band;
    const double band_high = options.tol_rank * options.rank_band;
    auto in_band = [&](double ratio) { return ratio >= band_low && ratio < band_high; };

    MinimalPolynomialResult out;
    for (int k = 1; k <= max_degree; ++k) {
        const Mat<Real> a = hankel_window(f, mode_count, k);
        Eigen::JacobiSVD<Mat<Real>> svd(a, Eigen::ComputeFullV);
        const Vec<Real>& sigma = svd.singularValues();
        const bool wide = a.cols() > a.rows();
        const Real ratio = wide || sigma(0) == Real(0) ? Real(0) : sigma(sigma.size() - 1) / sigma(0);
        out.scan.push_back({k, to_double(ratio)});
        if (!(ratio < Real(options.tol_rank))) {
            continue;
        }
        if (k > 1 && in_band(out.scan[out.scan.size() - 2].singular_ratio)) {
            throw Error(ErrorCode::RankAmbiguity,
                        "degrees " + std::to_string(k - 1) + " and " + std::to_string(k)
                            + " both lie within the rank tolerance band");
        }

        const Vec<Real> v = svd.matrixV().col(a.cols() - 1);
        if (abs(v(0)) <= Real(1e-30) * v.cwiseAbs().maxCoeff()) {
            throw Error(ErrorCode::NoKernelFound,
                        "kernel vector at degree " + std::to_string(k) + " has zero constant term");
        }
        out.polynomial.coefficients.resize(static_cast<std::size_t>(k) + 1);
        for (int l = 0; l <= k; ++l) {
            out.polynomial.coefficients[static_cast<std::size_t>(l)] = v(l) / v(0);
        }
        out.annihilation_residual = annihilation_residual(f, mode_count, out.polynomial);
        if (!(out.annihilation_residual <= options.tol_res)) {
            throw Error(ErrorCode::NumericalInstability,
                        "annihilation residual " + format_double(out.annihilation_residual)
                            + " exceeds tol_res " + format_double(options.tol_res));
        }
        return out;
    }
    throw Error(ErrorCode::NoKernelFound,
                "no degree up to " + std::to_string(max_degree) + " is rank deficient");
}

std::vector<RootCluster> roots_with_multiplicity(const MinimalPolynomial& q,
                                                 const InverseOptions& options)
{
    if (q.degree() < 1 || q.coefficients.front() != Real(1)) {
        throw Error(ErrorCode::InvalidArgument, "minimal polynomial needs degree >= 1 and g_0 = 1");
    }
    return cluster_roots(q, reversed_polynomial_roots(q), options.tol_root, options.tol_imag);
}

WeightSolution solve_weights(const std::vector<Real>& f, const std::vector<RootCluster>& roots,
                             const InverseOptions& options)
{
    WeightSolution w = fit_weights(f, roots);
    check_weights(w, options);
    return w;
}

InversionReport invert_distribution(const PhotonDistribution<Real>& p,
                                    const InverseOptions& options)
{
    InversionReport report;
    report.mode_count = p.mode_count;
    try {
        const int s = p.mode_count;
        if (s < 1) {
            throw Error(ErrorCode::InvalidArgument, "mode count must be positive", "input");
        }
        const std::vector<Real> f =
            staged("probabilities_to_f", [&] { return probabilities_to_f(p, 8 * s); });

        const auto minimal = staged("find_minimal_polynomial",
                                    [&] { return find_minimal_polynomial(f, s, options); });
        report.hankel_scan = minimal.scan;
        report.polynomial = minimal.polynomial;
        report.annihilation_residual = minimal.annihilation_residual;

        // The nominal clustering first, then coarser and finer alternatives
        // for borderline pairs; the smallest weight residual wins.
        const auto raw_roots =
            staged("roots_with_multiplicity", [&] { return reversed_polynomial_roots(minimal.polynomial); });
        const double scales[] = {1.0, 100.0, 0.01};
        std::vector<RootCluster> best_roots;
        WeightSolution best_weights;
        bool have_best = false;
        Error first_error(ErrorCode::IllConditioned, "no root clustering produced weights");
        bool have_error = false;
        std::vector<std::vector<int>> tried;
        for (double scale : scales) {
            std::vector<RootCluster> roots;
            WeightSolution w;
            try {
                roots = staged("roots_with_multiplicity", [&] {
                    return cluster_roots(minimal.polynomial, raw_roots, options.tol_root * scale,
                                         options.tol_imag);
                });
                std::vector<int> pattern;
                for (const auto& r : roots) {
                    pattern.push_back(r.multiplicity);
                }
                if (std::find(tried.begin(), tried.end(), pattern) != tried.end()) {
                    continue;
                }
                tried.push_back(pattern);
                ++report.clustering_candidates;
                w = staged("solve_weights", [&] {
                    WeightSolution candidate = fit_weights(f, roots);
                    check_weights(candidate, options);
                    return candidate;
                });
            } catch (const Error& e) {
                if (!have_error) {
                    first_error = e;
                    have_error = true;
                }
                if (scale == 1.0) {
                    report.roots = roots;
                }
                continue;
            }
            if (!have_best || w.residual < best_weights.residual) {
                best_roots = roots;
                best_weights = w;
                have_best = true;
            }
            if (scale == 1.0) {
                break;
            }
        }
        if (!have_best) {
            throw first_error;
        }
        report.roots = best_roots;
        report.weight_residual = best_weights.residual;

        staged("reconstruct", [&] {
            for (const Real& m : best_weights.multiplicities) {
                report.multiplicities_raw.push_back(to_double(m));
            }
            const std::vector<int> m = integer_multiplicities(report.multiplicities_raw, s);
            NormalParameters np;
            for (std::size_t k = 0; k < best_roots.size(); ++k) {
                const Real& lp = best_roots[k].lambda_prime;
                const Real lambda = lp / (Real(1) - lp);
                const Real omega = std::max(Real(0), best_weights.displacement_weights[k]);
                np.eigenvalues.push_back(to_double(lambda));
                np.multiplicities.push_back(m[k]);
                np.displacement_norms.push_back(to_double((Real(1) + lambda) * sqrt(omega)));
                report.rounding_deltas.push_back(std::abs(report.multiplicities_raw[k] - m[k]));
            }
            validate_normal_parameters(np, 0.0);
            report.parameters = std::move(np);
            return 0;
        });
    } catch (const Error& e) {
        throw InversionError(e, std::move(report));
    }
    return report;
}

InversionReport invert_distribution(const PhotonDistribution<double>& p,
                                    const InverseOptions& options)
{
    return invert_distribution(p.cast<Real>(), options);
}

}  // namespace gauss_counter
