#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "lrlab/constants.hpp"
#include "lrlab/eig.hpp"
#include "lrlab/spin.hpp"

namespace lrlab {

enum class TermKind { heisenberg, anisotropy, zeeman, tip, custom };

inline const char* term_kind_name(TermKind k) {
    switch (k) {
        case TermKind::heisenberg: return "heisenberg";
        case TermKind::anisotropy: return "anisotropy";
        case TermKind::zeeman: return "zeeman";
        case TermKind::tip: return "tip";
        case TermKind::custom: return "custom";
    }
    return "?";
}

/// One interaction Phi(X): Hermitian matrix on the support space, with its
/// operator norm (meV) cached at construction.
struct InteractionTerm {
    std::vector<int> support;
    MatrixC matrix;
    double norm = 0.0;
    TermKind kind = TermKind::custom;

    int body_count() const { return static_cast<int>(support.size()); }
};

inline InteractionTerm make_interaction_term(std::vector<int> support, MatrixC matrix, TermKind kind) {
    InteractionTerm t;
    t.support = std::move(support);
    t.norm = operator_norm(matrix); // also enforces Hermiticity
    t.matrix = std::move(matrix);
    t.kind = kind;
    if (!std::is_sorted(t.support.begin(), t.support.end()) ||
        std::adjacent_find(t.support.begin(), t.support.end()) != t.support.end())
        throw domain_error("interaction support must be strictly ascending");
    return t;
}

/// Heisenberg exchange sum_alpha J^alpha S^alpha_i S^alpha_j (meV).
inline InteractionTerm heisenberg_term(int i, int j, std::array<double, 3> J, double s_i, double s_j) {
    if (i == j) throw domain_error("heisenberg_term needs two distinct sites");
    if (i > j) {
        std::swap(i, j);
        std::swap(s_i, s_j);
    }
    const SpinMatrices a = spin_matrices(s_i), b = spin_matrices(s_j);
    const int d = spin_dim(s_i) * spin_dim(s_j);
    MatrixC m = MatrixC::Zero(d, d);
    for (int alpha = 0; alpha < 3; ++alpha)
        if (J[static_cast<size_t>(alpha)] != 0.0)
            m += J[static_cast<size_t>(alpha)] * Eigen::kroneckerProduct(a.component(alpha), b.component(alpha)).eval();
    return make_interaction_term({i, j}, std::move(m), TermKind::heisenberg);
}

/// Uniaxial anisotropy K (S^z_i)^2 (meV).
inline InteractionTerm anisotropy_term(int i, double K, double s) {
    const SpinMatrices sm = spin_matrices(s);
    return make_interaction_term({i}, K * (sm.sz * sm.sz), TermKind::anisotropy);
}

/// Zeeman coupling g mu_B B.S_i, field in tesla.
inline InteractionTerm zeeman_term(int i, double g_factor, std::array<double, 3> B, double s) {
    const SpinMatrices sm = spin_matrices(s);
    const int d = spin_dim(s);
    MatrixC m = MatrixC::Zero(d, d);
    for (int alpha = 0; alpha < 3; ++alpha)
        m += g_factor * constants::mu_bohr_mev_per_tesla * B[static_cast<size_t>(alpha)] * sm.component(alpha);
    return make_interaction_term({i}, std::move(m), TermKind::zeeman);
}

/// Tip coupling parameters. The scalar prefactor
/// p = g * I0 * polarization * exp(-2 kappa |h|) carries the meV scale; the
/// spectral norm of the resulting perturbation is p * s.
struct TipParameters {
    double g = 1.0;           // coupling constant
    double current_i0 = 1.0;  // averaged spin-polarized current
    double polarization = 1.0;
    double kappa = 0.0;       // inverse decay length
    double height = 0.0;      // tip height, same length unit as 1/kappa
    int site = 0;
    std::array<double, 3> m_tip = {0.0, 0.0, 1.0}; // unit vector

    double prefactor() const {
        return g * current_i0 * polarization * std::exp(-2.0 * kappa * std::sqrt(height * height));
    }
};

inline void validate_tip_direction(const std::array<double, 3>& m) {
    const double n2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
        throw domain_error("tip magnetization direction must be a unit vector");
}

/// Tip perturbation p * (m_tip . S) acting on one site.
inline InteractionTerm tip_term_from_prefactor(int site, std::array<double, 3> m_tip, double p, double s) {
    validate_tip_direction(m_tip);
    if (p < 0.0) throw domain_error("tip prefactor must be nonnegative; put the sign into m_tip");
    const SpinMatrices sm = spin_matrices(s);
    const int d = spin_dim(s);
    MatrixC m = MatrixC::Zero(d, d);
    for (int alpha = 0; alpha < 3; ++alpha)
        m += p * m_tip[static_cast<size_t>(alpha)] * sm.component(alpha);
    return make_interaction_term({site}, std::move(m), TermKind::tip);
}

inline InteractionTerm tip_term(const TipParameters& params, double s) {
    return tip_term_from_prefactor(params.site, params.m_tip, params.prefactor(), s);
}

/// Tip term dialed directly by its norm ||P|| = p*s (meV).
inline InteractionTerm tip_term_from_norm(int site, std::array<double, 3> m_tip, double norm_p, double s) {
    if (norm_p < 0.0) throw domain_error("||P|| must be nonnegative");
    return tip_term_from_prefactor(site, m_tip, norm_p / s, s);
}

} // namespace lrlab
