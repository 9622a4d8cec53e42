#pragma once

#include <functional>
#include <random>

#include <Eigen/Dense>

#include "lrlab/errors.hpp"
#include "lrlab/spin.hpp"

namespace lrlab {

using ApplyFn = std::function<void(const VectorC&, VectorC&)>; // y = H x

/// Spectral-norm estimate by power iteration with a fixed-seed start vector
/// (deterministic), inflated by 5% so step-size choices stay conservative.
inline double estimate_spectral_norm(const ApplyFn& apply, long dim, int iters = 60) {
    std::mt19937 rng(0x5eed1234u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorC v(dim), w(dim);
    for (long i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    double norm = 0.0;
    for (int it = 0; it < iters; ++it) {
        w.setZero();
        apply(v, w);
        norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
    }
    return 1.05 * norm;
}

/// One Krylov step: y = exp(-i H dt) x, Lanczos with full
/// reorthogonalization, truncating early on happy breakdown.
inline VectorC lanczos_expm_apply(const ApplyFn& apply, const VectorC& x, double dt_natural, int order) {
    const long n = x.size();
    const double x_norm = x.norm();
    if (x_norm == 0.0) return x;

    MatrixC basis(n, order);
    VectorR alpha(order), beta(order); // beta[j]: coupling j -> j+1
    basis.col(0) = x / x_norm;
    int m = order;
    VectorC w(n);
    for (int j = 0; j < order; ++j) {
        w.setZero();
        apply(basis.col(j), w);
        alpha(j) = w.dot(basis.col(j)).real();
        w -= alpha(j) * basis.col(j);
        if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
        for (int k = 0; k <= j; ++k) w -= basis.col(k).dot(w) * basis.col(k); // reorthogonalize
        const double b = w.norm();
        if (j + 1 < order) {
            beta(j) = b;
            if (b < 1e-14 * x_norm) {
                m = j + 1;
                break;
            }
            basis.col(j + 1) = w / b;
        }
    }

    Eigen::MatrixXd t_mat = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        t_mat(j, j) = alpha(j);
        if (j + 1 < m) t_mat(j + 1, j) = t_mat(j, j + 1) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_mat);
    if (es.info() != Eigen::Success) throw numeric_error("Lanczos tridiagonal eigensolver failed");
    VectorC phases(m);
    for (int j = 0; j < m; ++j)
        phases(j) = std::exp(Complex(0.0, -es.eigenvalues()(j) * dt_natural));
    const Eigen::VectorXd first_row = es.eigenvectors().row(0);
    VectorC coeff = es.eigenvectors().cast<Complex>() * (phases.cwiseProduct(first_row.cast<Complex>()));
    return basis.leftCols(m) * (x_norm * coeff);
}

/// Propagate psi by exp(-i H t) in substeps no larger than max_step_natural.
inline VectorC krylov_propagate(const ApplyFn& apply, VectorC psi, double t_natural,
                                double max_step_natural, int order) {
    if (t_natural == 0.0) return psi;
    if (!(max_step_natural > 0.0)) throw domain_error("Krylov step must be positive");
    const int n_steps = std::max(1, static_cast<int>(std::ceil(std::abs(t_natural) / max_step_natural)));
    const double dt = t_natural / n_steps;
    for (int i = 0; i < n_steps; ++i) psi = lanczos_expm_apply(apply, psi, dt, order);
    return psi;
}

} // namespace lrlab
