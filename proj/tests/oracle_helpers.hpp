#pragma once

// Test-side oracles, deliberately independent of the library implementations
// they check.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lrlab/spin.hpp"

namespace oracle {

using lrlab::Complex;
using lrlab::MatrixC;

// Kronecker embedding by brute-force digit decoding of full-space indices.
// O(dim^2 * sites); fine for the small systems the tests use.
inline MatrixC naive_embed(const std::vector<int>& support, const MatrixC& op,
                           const std::vector<int>& dims) {
    long n = 1;
    for (int d : dims) n *= d;
    auto digits = [&](long idx) {
        std::vector<int> dg(dims.size());
        for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
            dg[static_cast<size_t>(k)] = static_cast<int>(idx % dims[static_cast<size_t>(k)]);
            idx /= dims[static_cast<size_t>(k)];
        }
        return dg;
    };
    auto support_index = [&](const std::vector<int>& dg) {
        long idx = 0;
        for (int site : support) idx = idx * dims[static_cast<size_t>(site)] + dg[static_cast<size_t>(site)];
        return idx;
    };
    MatrixC full = MatrixC::Zero(n, n);
    for (long r = 0; r < n; ++r) {
        const auto dr = digits(r);
        for (long c = 0; c < n; ++c) {
            const auto dc = digits(c);
            bool same_rest = true;
            for (size_t k = 0; k < dims.size(); ++k) {
                bool in_support = false;
                for (int s : support)
                    if (s == static_cast<int>(k)) in_support = true;
                if (!in_support && dr[k] != dc[k]) {
                    same_rest = false;
                    break;
                }
            }
            if (same_rest) full(r, c) = op(support_index(dr), support_index(dc));
        }
    }
    return full;
}

inline MatrixC random_hermitian(long n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixC m(n, n);
    for (long c = 0; c < n; ++c)
        for (long r = 0; r < n; ++r) m(r, c) = Complex(gauss(rng), gauss(rng));
    return 0.5 * (m + m.adjoint().eval());
}

inline MatrixC random_complex(long n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixC m(n, n);
    for (long c = 0; c < n; ++c)
        for (long r = 0; r < n; ++r) m(r, c) = Complex(gauss(rng), gauss(rng));
    return m;
}

inline double max_abs(const MatrixC& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace oracle
