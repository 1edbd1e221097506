#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gauss_counter/state_model.hpp"

namespace test_support {

using gauss_counter::GaussianStateSpec;
using gauss_counter::NormalParameters;

inline Eigen::MatrixXd random_orthogonal(Eigen::Index dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(dim, dim);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        g(i) = normal(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR();
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (r(i, i) < 0) {
            q.col(i) *= -1.0;
        }
    }
    return q;
}

/// Rotates a state by a random orthogonal matrix.
inline GaussianStateSpec rotate(const GaussianStateSpec& spec, const Eigen::MatrixXd& o)
{
    GaussianStateSpec out = spec;
    out.covariance = o * spec.covariance * o.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    out.displacement = o * spec.displacement;
    return out;
}

/// Orthogonal symplectic matrix of a random passive interferometer in
/// (q1, p1, q2, p2, ...) ordering: the realification of a random unitary.
inline Eigen::MatrixXd random_passive(int modes, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd g(modes, modes);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        g(i) = {normal(rng), normal(rng)};
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    const Eigen::MatrixXcd u = qr.householderQ();
    Eigen::MatrixXd o(2 * modes, 2 * modes);
    for (int j = 0; j < modes; ++j) {
        for (int k = 0; k < modes; ++k) {
            const double x = u(j, k).real();
            const double y = u(j, k).imag();
            o(2 * j, 2 * k) = x;
            o(2 * j, 2 * k + 1) = -y;
            o(2 * j + 1, 2 * k) = y;
            o(2 * j + 1, 2 * k + 1) = x;
        }
    }
    return o;
}

/// Random physical state: thermal occupations, single-mode squeezing and two
/// passive interferometers, plus a random displacement.
inline GaussianStateSpec random_physical_state(int modes, std::mt19937_64& rng,
                                               double max_thermal = 2.0,
                                               double max_squeezing = 0.5,
                                               double max_displacement = 1.0)
{
    std::uniform_real_distribution<double> thermal(1.0, max_thermal);
    std::uniform_real_distribution<double> squeeze(0.0, max_squeezing);
    std::uniform_real_distribution<double> shift(-max_displacement, max_displacement);
    const Eigen::Index dim = 2 * modes;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < modes; ++k) {
        const double tau = thermal(rng);
        const double xi = squeeze(rng);
        t(2 * k, 2 * k) = tau;
        t(2 * k + 1, 2 * k + 1) = tau;
        z(2 * k, 2 * k) = std::exp(xi);
        z(2 * k + 1, 2 * k + 1) = std::exp(-xi);
    }
    const Eigen::MatrixXd o1 = random_passive(modes, rng);
    const Eigen::MatrixXd o2 = random_passive(modes, rng);
    const Eigen::MatrixXd s = o2 * z * o1;
    GaussianStateSpec spec;
    spec.mode_count = modes;
    spec.covariance = s * t * s.transpose();
    spec.covariance = 0.5 * (spec.covariance + spec.covariance.transpose());
    spec.displacement.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        spec.displacement(i) = shift(rng);
    }
    return spec;
}

/// Random composition of 2S into `parts` positive integers.
inline std::vector<int> random_composition(int total, int parts, std::mt19937_64& rng)
{
    std::vector<int> cuts(static_cast<std::size_t>(total) - 1);
    for (int i = 0; i < total - 1; ++i) {
        cuts[static_cast<std::size_t>(i)] = i + 1;
    }
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(static_cast<std::size_t>(parts) - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> out;
    int prev = 0;
    for (int c : cuts) {
        out.push_back(c - prev);
        prev = c;
    }
    out.push_back(total - prev);
    return out;
}

/// Random distinct eigenvalues in [lo, hi], decreasing, with relative gaps of
/// at least `min_gap`.
inline std::vector<double> random_spectrum(int count, std::mt19937_64& rng, double lo = 0.3,
                                           double hi = 5.0, double min_gap = 0.05)
{
    std::uniform_real_distribution<double> uniform(lo, hi);
    for (;;) {
        std::vector<double> v(static_cast<std::size_t>(count));
        for (double& x : v) {
            x = uniform(rng);
        }
        std::sort(v.begin(), v.end(), std::greater<>());
        bool ok = true;
        for (std::size_t k = 1; k < v.size(); ++k) {
            ok = ok && (v[k - 1] - v[k]) / v[k - 1] >= min_gap;
        }
        if (ok) {
            return v;
        }
    }
}

/// Randomized normal parameters: random number of distinct eigenvalues,
/// random multiplicities, c in [0, c_max].
inline NormalParameters random_normal_parameters(int modes, std::mt19937_64& rng,
                                                 double c_max = 2.0)
{
    std::uniform_int_distribution<int> parts(1, 2 * modes);
    std::uniform_real_distribution<double> disp(0.0, c_max);
    NormalParameters np;
    const int h = parts(rng);
    np.eigenvalues = random_spectrum(h, rng);
    np.multiplicities = random_composition(2 * modes, h, rng);
    for (int k = 0; k < h; ++k) {
        np.displacement_norms.push_back(disp(rng));
    }
    return np;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return a.size() == b.size() ? worst : INFINITY;
}

}  // namespace test_support
