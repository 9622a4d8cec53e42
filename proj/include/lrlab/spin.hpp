#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "lrlab/errors.hpp"

namespace lrlab {

using Complex = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;
using VectorR = Eigen::VectorXd;

/// True if 2s is a positive integer (s = 1/2, 1, 3/2, ...).
inline bool is_valid_spin(double s) {
    if (!(s > 0.0)) return false;
    double two_s = 2.0 * s;
    return std::abs(two_s - std::round(two_s)) < 1e-9;
}

/// Local Hilbert dimension 2s+1.
inline int spin_dim(double s) {
    if (!is_valid_spin(s)) throw domain_error("spin quantum number must be a positive half-integer, got " + std::to_string(s));
    return static_cast<int>(std::lround(2.0 * s)) + 1;
}

/// Angular momentum matrices for one spin-s site, in the |s,m> basis with
/// m = s, s-1, ..., -s. Dimensionless (units of hbar).
struct SpinMatrices {
    double s = 0.0;
    MatrixC sx, sy, sz;

    const MatrixC& component(int alpha) const {
        switch (alpha) {
            case 0: return sx;
            case 1: return sy;
            case 2: return sz;
        }
        throw domain_error("spin component index must be 0, 1 or 2");
    }
};

inline SpinMatrices spin_matrices(double s) {
    const int d = spin_dim(s);
    SpinMatrices out;
    out.s = s;
    MatrixC sp = MatrixC::Zero(d, d); // raising operator S+
    out.sz = MatrixC::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = s - k;
        out.sz(k, k) = m;
        if (k > 0) sp(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    const MatrixC sm = sp.adjoint();
    out.sx = 0.5 * (sp + sm);
    out.sy = Complex(0.0, -0.5) * (sp - sm);
    return out;
}

} // namespace lrlab
