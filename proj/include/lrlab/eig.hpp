#pragma once

#include <string>

#include <Eigen/Dense>

#include "lrlab/errors.hpp"
#include "lrlab/spin.hpp"

#ifdef LRLAB_USE_LAPACKE
#include <lapacke.h>
#endif

namespace lrlab {

struct HermitianEigen {
    VectorR values;  // ascending
    MatrixC vectors; // column k belongs to values[k]
};

/// Max absolute off-Hermitian deviation, max-entry norm of M - M^dagger.
inline double hermiticity_defect(const MatrixC& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const MatrixC& m, double tol, const char* what) {
    if (m.rows() != m.cols()) throw domain_error(std::string(what) + ": matrix is not square");
    if (m.size() == 0) return;
    const double defect = hermiticity_defect(m);
    if (defect > tol)
        throw domain_error(std::string(what) + ": matrix is not Hermitian (defect " + std::to_string(defect) + " > tol " + std::to_string(tol) + ")");
}

/// Full eigendecomposition of a Hermitian matrix. The input is assumed (not
/// re-checked) Hermitian; callers validate with require_hermitian where the
/// contract demands it.
inline HermitianEigen hermitian_eigen(const MatrixC& m, bool with_vectors = true) {
    const int n = static_cast<int>(m.rows());
    HermitianEigen out;
#ifdef LRLAB_USE_LAPACKE
    MatrixC a = m; // zheevd overwrites
    out.values.resize(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'L', n,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                     out.values.data());
    if (info != 0) throw numeric_error("zheevd failed with info=" + std::to_string(info));
    if (with_vectors) out.vectors = std::move(a);
#else
    Eigen::SelfAdjointEigenSolver<MatrixC> es(m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numeric_error("SelfAdjointEigenSolver failed");
    out.values = es.eigenvalues();
    if (with_vectors) out.vectors = es.eigenvectors();
#endif
    return out;
}

/// Eigenvalues only.
inline VectorR hermitian_eigenvalues(const MatrixC& m) {
    return hermitian_eigen(m, false).values;
}

/// Spectral norm (max |eigenvalue|) of a Hermitian matrix, with the
/// Hermiticity precondition enforced at tolerance 1e-10 (absolute, max entry).
inline double operator_norm(const MatrixC& m) {
    require_hermitian(m, 1e-10, "operator_norm");
    if (m.size() == 0) return 0.0;
    if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const VectorR w = hermitian_eigenvalues(m);
    return std::max(std::abs(w(0)), std::abs(w(w.size() - 1)));
}

} // namespace lrlab
