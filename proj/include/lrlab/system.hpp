#pragma once

#include <string>
#include <vector>

#include "lrlab/lattice.hpp"
#include "lrlab/local_operator.hpp"
#include "lrlab/terms.hpp"

namespace lrlab {

/// A spin lattice with its interaction list. The tip perturbation P is kept
/// out of the term list; it is built separately and switched on at t = 0.
struct SpinSystem {
    Lattice lattice;
    std::vector<double> spins; // per site
    std::vector<InteractionTerm> terms;

    SpinSystem() = default;
    SpinSystem(Lattice lat, double uniform_s)
        : lattice(lat), spins(static_cast<size_t>(lat.site_count()), uniform_s) {
        spin_dim(uniform_s);
    }
    SpinSystem(Lattice lat, std::vector<double> per_site_s) : lattice(lat), spins(std::move(per_site_s)) {
        if (static_cast<int>(spins.size()) != lattice.site_count())
            throw domain_error("need one spin quantum number per lattice site");
        for (double s : spins) spin_dim(s);
    }

    std::vector<int> dims() const {
        std::vector<int> d;
        d.reserve(spins.size());
        for (double s : spins) d.push_back(spin_dim(s));
        return d;
    }

    double spin_at(int site) const {
        if (!lattice.contains(site)) throw domain_error("site " + std::to_string(site) + " is outside the lattice");
        return spins[static_cast<size_t>(site)];
    }

    /// Product of local dimensions as a double (may exceed any integer cap;
    /// bounds-only systems are allowed to be astronomically large).
    double hilbert_dim_approx() const {
        double p = 1.0;
        for (double s : spins) p *= static_cast<double>(spin_dim(s));
        return p;
    }

    /// Exact Hilbert dimension, enforcing the configured cap.
    long hilbert_dim(long cap = limits::max_hilbert_dim()) const {
        return detail::checked_total_dim(dims(), cap);
    }

    void add_term(InteractionTerm t) {
        for (int site : t.support)
            if (!lattice.contains(site))
                throw domain_error("term support site " + std::to_string(site) + " is outside the lattice");
        terms.push_back(std::move(t));
    }

    void add_heisenberg(int i, int j, std::array<double, 3> J) {
        add_term(heisenberg_term(i, j, J, spin_at(i), spin_at(j)));
    }
    void add_heisenberg(int i, int j, double J) { add_heisenberg(i, j, {J, J, J}); }

    /// Heisenberg exchange on every nearest-neighbor bond.
    void add_nn_heisenberg(std::array<double, 3> J) {
        for (auto [a, b] : lattice.nearest_neighbor_bonds()) add_heisenberg(a, b, J);
    }
    void add_nn_heisenberg(double J) { add_nn_heisenberg({J, J, J}); }

    void add_anisotropy(int i, double K) { add_term(anisotropy_term(i, K, spin_at(i))); }
    void add_anisotropy_all(double K) {
        for (int i = 0; i < lattice.site_count(); ++i) add_anisotropy(i, K);
    }

    void add_zeeman(int i, double g_factor, std::array<double, 3> B) {
        add_term(zeeman_term(i, g_factor, B, spin_at(i)));
    }
    void add_zeeman_all(double g_factor, std::array<double, 3> B) {
        for (int i = 0; i < lattice.site_count(); ++i) add_zeeman(i, g_factor, B);
    }
};

/// S^alpha on one site as a LocalOperator (alpha: 0=x, 1=y, 2=z).
inline LocalOperator site_spin_operator(const SpinSystem& sys, int site, int alpha) {
    const SpinMatrices sm = spin_matrices(sys.spin_at(site));
    return LocalOperator({site}, sm.component(alpha));
}

inline MatrixC embed(const LocalOperator& op, const SpinSystem& sys,
                     long dim_cap = limits::max_hilbert_dim()) {
    return embed(op, sys.dims(), dim_cap);
}

/// H_Phi(Lambda): sum of all interactions whose support lies inside the
/// subset, embedded into the full Hilbert space.
inline MatrixC assemble_hamiltonian(const SpinSystem& sys, const std::vector<int>& subset,
                                    long dim_cap = limits::max_hilbert_dim()) {
    const std::vector<int> dims = sys.dims();
    const long n = detail::checked_total_dim(dims, dim_cap);
    MatrixC h = MatrixC::Zero(n, n);
    std::vector<int> sorted = subset;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& t : sys.terms) {
        bool inside = true;
        for (int site : t.support)
            if (!std::binary_search(sorted.begin(), sorted.end(), site)) {
                inside = false;
                break;
            }
        if (inside) h += embed(LocalOperator(t.support, t.matrix), dims, dim_cap);
    }
    return h;
}

/// H over the whole lattice.
inline MatrixC assemble_hamiltonian(const SpinSystem& sys, long dim_cap = limits::max_hilbert_dim()) {
    std::vector<int> all(static_cast<size_t>(sys.lattice.site_count()));
    for (int i = 0; i < sys.lattice.site_count(); ++i) all[static_cast<size_t>(i)] = i;
    return assemble_hamiltonian(sys, all, dim_cap);
}

} // namespace lrlab
