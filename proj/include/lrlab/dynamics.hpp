#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrlab/bounds.hpp"
#include "lrlab/eig.hpp"
#include "lrlab/format.hpp"
#include "lrlab/krylov.hpp"
#include "lrlab/local_operator.hpp"
#include "lrlab/sz_sectors.hpp"
#include "lrlab/system.hpp"

namespace lrlab {

class insufficient_data_error : public domain_error {
public:
    using domain_error::domain_error;
};

inline double beta_from_temperature_kelvin(double t_kelvin) {
    if (!(t_kelvin > 0.0)) throw domain_error("temperature must be positive");
    return 1.0 / (constants::k_boltzmann_mev_per_kelvin * t_kelvin);
}

/// Sampled expectation-value or commutator-norm series over a ps time grid.
struct TimeSeries {
    std::vector<double> times; // ps, strictly increasing
    std::vector<double> values;
    std::string observable;
    std::map<std::string, std::string> params;
};

// ---------------------------------------------------------------------------
// Spectral decompositions, optionally split into total-S^z sectors
// ---------------------------------------------------------------------------

struct SectorEigen {
    std::vector<int> indices; // product-basis states of this block
    VectorR values;
    MatrixC vectors;
};

struct SpectralDecomposition {
    long dim = 0;
    bool sector_split = false;
    std::vector<SectorEigen> sectors;

    long state_count() const {
        long n = 0;
        for (const auto& s : sectors) n += s.values.size();
        return n;
    }
};

namespace detail {

inline MatrixC gather_block(const MatrixC& m, const std::vector<int>& idx) {
    MatrixC out(idx.size(), idx.size());
    for (size_t c = 0; c < idx.size(); ++c)
        for (size_t r = 0; r < idx.size(); ++r)
            out(static_cast<long>(r), static_cast<long>(c)) = m(idx[r], idx[c]);
    return out;
}

inline bool system_conserves_sz(const SpinSystem& sys) {
    for (const auto& t : sys.terms)
        if (!conserves_total_sz(t, sys.spins)) return false;
    return true;
}

} // namespace detail

/// Diagonalize H (plus an optional extra term, e.g. the tip) either as one
/// dense block or split into total-S^z sectors when every term commutes with
/// total S^z. The sector split is a pure speed optimization; both paths are
/// exact and cross-checked in the test suite.
inline SpectralDecomposition decompose_hamiltonian(const SpinSystem& sys,
                                                   const InteractionTerm* extra = nullptr,
                                                   long dim_cap = limits::max_hilbert_dim(),
                                                   bool force_dense = false) {
    const std::vector<int> dims = sys.dims();
    SpectralDecomposition out;
    out.dim = detail::checked_total_dim(dims, dim_cap);

    MatrixC h = assemble_hamiltonian(sys, dim_cap);
    if (extra) h += embed(LocalOperator(extra->support, extra->matrix), dims, dim_cap);

    bool split = !force_dense && detail::system_conserves_sz(sys) &&
                 (!extra || conserves_total_sz(*extra, sys.spins));
    if (split) {
        out.sector_split = true;
        for (auto& idx : sz_sector_indices(sys.spins)) {
            SectorEigen sec;
            sec.indices = std::move(idx);
            auto eig = hermitian_eigen(detail::gather_block(h, sec.indices));
            sec.values = std::move(eig.values);
            sec.vectors = std::move(eig.vectors);
            out.sectors.push_back(std::move(sec));
        }
    } else {
        SectorEigen sec;
        sec.indices.resize(static_cast<size_t>(out.dim));
        for (long i = 0; i < out.dim; ++i) sec.indices[static_cast<size_t>(i)] = static_cast<int>(i);
        auto eig = hermitian_eigen(h);
        sec.values = std::move(eig.values);
        sec.vectors = std::move(eig.vectors);
        out.sectors.push_back(std::move(sec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gibbs states
// ---------------------------------------------------------------------------

/// Eigen-decomposed thermal state of the free Hamiltonian. Weights are
/// Boltzmann factors normalized after shifting by the ground energy, indexed
/// like the concatenated eigenvalue lists of the decomposition's sectors.
struct ThermalState {
    double beta = 0.0; // 1/meV
    SpectralDecomposition decomp;
    VectorR weights;
    double ground_energy = 0.0;

    double weight(int sector, int column) const {
        long off = 0;
        for (int s = 0; s < sector; ++s) off += decomp.sectors[static_cast<size_t>(s)].values.size();
        return weights(off + column);
    }
};

inline ThermalState gibbs_from_decomposition(SpectralDecomposition decomp, double beta) {
    if (beta < 0.0) throw domain_error("inverse temperature must be >= 0");
    ThermalState st;
    st.beta = beta;
    st.decomp = std::move(decomp);
    const long n = st.decomp.state_count();
    st.weights.resize(n);
    double e_min = std::numeric_limits<double>::infinity();
    for (const auto& s : st.decomp.sectors)
        if (s.values.size() > 0) e_min = std::min(e_min, s.values.minCoeff());
    st.ground_energy = e_min;
    long k = 0;
    double z = 0.0;
    for (const auto& s : st.decomp.sectors)
        for (long j = 0; j < s.values.size(); ++j) {
            const double w = std::exp(-beta * (s.values(j) - e_min));
            st.weights(k++) = w;
            z += w;
        }
    st.weights /= z;
    return st;
}

inline ThermalState gibbs_state(const SpinSystem& sys, double beta,
                                long dim_cap = limits::max_hilbert_dim(), bool force_dense = false) {
    return gibbs_from_decomposition(decompose_hamiltonian(sys, nullptr, dim_cap, force_dense), beta);
}

/// Gibbs state straight from a dense Hermitian matrix (single block).
inline ThermalState gibbs_state(const MatrixC& h, double beta) {
    require_hermitian(h, 1e-10, "gibbs_state");
    SpectralDecomposition d;
    d.dim = h.rows();
    d.sectors.resize(1);
    d.sectors[0].indices.resize(static_cast<size_t>(d.dim));
    for (long i = 0; i < d.dim; ++i) d.sectors[0].indices[static_cast<size_t>(i)] = static_cast<int>(i);
    auto eig = hermitian_eigen(h);
    d.sectors[0].values = std::move(eig.values);
    d.sectors[0].vectors = std::move(eig.vectors);
    return gibbs_from_decomposition(std::move(d), beta);
}

/// omega^beta(A): thermal expectation in the free system.
inline double thermal_expectation(const ThermalState& state, const std::vector<int>& dims,
                                  const LocalOperator& a) {
    double acc = 0.0;
    long k = 0;
    VectorC full(state.decomp.dim), applied(state.decomp.dim);
    for (const auto& sec : state.decomp.sectors) {
        for (long j = 0; j < sec.values.size(); ++j, ++k) {
            const double w = state.weights(k);
            if (w < 1e-300) continue;
            full.setZero();
            for (size_t r = 0; r < sec.indices.size(); ++r)
                full(sec.indices[r]) = sec.vectors(static_cast<long>(r), j);
            applied.setZero();
            apply_local_add(a, dims, full, applied);
            acc += w * full.dot(applied).real();
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Exact time evolution of thermal expectation values
// ---------------------------------------------------------------------------

enum class EvolveMethod { automatic, dense, krylov };

struct EvolveOptions {
    EvolveMethod method = EvolveMethod::automatic;
    double weight_cutoff = 1e-13;  // drop Gibbs weights below this (normalized)
    int krylov_order = 30;
    double krylov_step_factor = 0.01; // step <= factor * hbar / ||H+P||
    long dense_dim_limit = limits::default_dense_evolve_dim;
    long dim_cap = limits::max_hilbert_dim();
};

namespace detail {

struct DominantState {
    int sector = 0;
    int column = 0;
    double weight = 0.0;
};

inline std::vector<DominantState> dominant_states(const ThermalState& state, double cutoff,
                                                  double* dropped = nullptr) {
    std::vector<DominantState> out;
    long k = 0;
    double kept = 0.0;
    for (int s = 0; s < static_cast<int>(state.decomp.sectors.size()); ++s) {
        const auto& sec = state.decomp.sectors[static_cast<size_t>(s)];
        for (long j = 0; j < sec.values.size(); ++j, ++k) {
            const double w = state.weights(k);
            if (w >= cutoff) {
                out.push_back({s, static_cast<int>(j), w});
                kept += w;
            }
        }
    }
    if (out.empty()) { // keep at least the ground state
        int best_s = 0, best_j = 0;
        double best_w = -1.0;
        k = 0;
        for (int s = 0; s < static_cast<int>(state.decomp.sectors.size()); ++s) {
            const auto& sec = state.decomp.sectors[static_cast<size_t>(s)];
            for (long j = 0; j < sec.values.size(); ++j, ++k)
                if (state.weights(k) > best_w) {
                    best_w = state.weights(k);
                    best_s = s;
                    best_j = static_cast<int>(j);
                }
        }
        out.push_back({best_s, best_j, best_w});
        kept = best_w;
    }
    if (dropped) *dropped = std::max(0.0, 1.0 - kept);
    return out;
}

} // namespace detail

/// <A>(t) = omega^beta(exp(i(H+P)t/hbar) A exp(-i(H+P)t/hbar)), with the
/// Gibbs state taken for the free H and the perturbation switched on at
/// t = 0. The tip pointer may be null (free evolution).
///
/// Dense method: eigendecompose H+P once (sector-blocked when total S^z is
/// conserved), then rotate each retained Gibbs eigenvector through the
/// propagator per time point. Krylov method: Lanczos stepping per retained
/// eigenvector, for dimensions past the dense limit.
inline TimeSeries evolve_observable(const SpinSystem& sys, const InteractionTerm* tip,
                                    const ThermalState& state, const LocalOperator& a,
                                    const std::vector<double>& times_ps,
                                    const EvolveOptions& opts = {},
                                    const std::string& observable_name = "A") {
    const std::vector<int> dims = sys.dims();
    const long n = detail::checked_total_dim(dims, opts.dim_cap);
    if (state.decomp.dim != n) throw domain_error("thermal state dimension does not match system");
    for (size_t i = 1; i < times_ps.size(); ++i)
        if (!(times_ps[i] > times_ps[i - 1])) throw domain_error("time grid must be strictly increasing");

    double dropped = 0.0;
    const auto dom = detail::dominant_states(state, opts.weight_cutoff, &dropped);

    TimeSeries out;
    out.times = times_ps;
    out.values.assign(times_ps.size(), 0.0);
    out.observable = observable_name;
    out.params["beta_inv_mev"] = fmt17(state.beta);
    out.params["weight_cutoff"] = fmt17(opts.weight_cutoff);
    out.params["dropped_weight"] = fmt17(dropped);
    out.params["states_kept"] = std::to_string(dom.size());

    EvolveMethod method = opts.method;
    const bool tip_conserves = !tip || conserves_total_sz(*tip, sys.spins);
    if (method == EvolveMethod::automatic)
        method = (n <= opts.dense_dim_limit || (state.decomp.sector_split && tip_conserves))
                     ? EvolveMethod::dense
                     : EvolveMethod::krylov;

    if (method == EvolveMethod::dense) {
        // Decomposition of H+P. Free evolution reuses the state's own
        // decomposition; a sector-split state with a conserving tip keeps the
        // same index partition so eigenvectors stay sector-local.
        const SpectralDecomposition* prop = &state.decomp;
        SpectralDecomposition own;
        if (tip) {
            const bool keep_split = state.decomp.sector_split && tip_conserves;
            own = decompose_hamiltonian(sys, tip, opts.dim_cap, /*force_dense=*/!keep_split);
            prop = &own;
        }
        out.params["method"] = "dense";

        VectorC psi_full(n), y_full(n), applied(n), phi;
        for (const auto& d : dom) {
            const auto& sec_h = state.decomp.sectors[static_cast<size_t>(d.sector)];
            // the propagator sector holding this state
            const SectorEigen* sec_p = nullptr;
            if (prop->sector_split) {
                sec_p = &prop->sectors[static_cast<size_t>(d.sector)];
            } else {
                sec_p = &prop->sectors[0];
            }
            // state vector in the propagator block basis
            if (prop->sector_split || !state.decomp.sector_split) {
                phi = sec_p->vectors.adjoint() * sec_h.vectors.col(d.column);
            } else {
                psi_full.setZero();
                for (size_t r = 0; r < sec_h.indices.size(); ++r)
                    psi_full(sec_h.indices[r]) = sec_h.vectors(static_cast<long>(r), d.column);
                phi = sec_p->vectors.adjoint() * psi_full;
            }
            VectorC rotated(phi.size());
            for (size_t it = 0; it < times_ps.size(); ++it) {
                const double t_nat = times_ps[it] / constants::hbar_mev_ps;
                for (long j = 0; j < phi.size(); ++j)
                    rotated(j) = std::exp(Complex(0.0, -sec_p->values(j) * t_nat)) * phi(j);
                VectorC y_sec = sec_p->vectors * rotated;
                y_full.setZero();
                for (size_t r = 0; r < sec_p->indices.size(); ++r)
                    y_full(sec_p->indices[r]) = y_sec(static_cast<long>(r));
                applied.setZero();
                apply_local_add(a, dims, y_full, applied, opts.dim_cap);
                out.values[it] += d.weight * y_full.dot(applied).real();
            }
        }
        return out;
    }

    // Krylov: propagate each retained eigenvector by Lanczos substeps.
    out.params["method"] = "krylov";
    std::vector<LocalOperator> ops;
    for (const auto& t : sys.terms) ops.emplace_back(t.support, t.matrix);
    if (tip) ops.emplace_back(tip->support, tip->matrix);
    ApplyFn apply = [&](const VectorC& x, VectorC& y) {
        for (const auto& op : ops) apply_local_add(op, dims, x, y, opts.dim_cap);
    };
    const double norm_hp = estimate_spectral_norm(apply, n);
    const double max_step = (norm_hp > 0.0) ? opts.krylov_step_factor / norm_hp
                                            : std::numeric_limits<double>::infinity();
    out.params["krylov_order"] = std::to_string(opts.krylov_order);
    out.params["krylov_step_natural"] = fmt17(max_step);

    VectorC applied(n);
    for (const auto& d : dom) {
        const auto& sec_h = state.decomp.sectors[static_cast<size_t>(d.sector)];
        VectorC psi = VectorC::Zero(n);
        for (size_t r = 0; r < sec_h.indices.size(); ++r)
            psi(sec_h.indices[r]) = sec_h.vectors(static_cast<long>(r), d.column);
        double t_prev = 0.0;
        for (size_t it = 0; it < times_ps.size(); ++it) {
            const double t_nat = times_ps[it] / constants::hbar_mev_ps;
            psi = krylov_propagate(apply, std::move(psi), t_nat - t_prev, max_step, opts.krylov_order);
            t_prev = t_nat;
            applied.setZero();
            apply_local_add(a, dims, psi, applied, opts.dim_cap);
            out.values[it] += d.weight * psi.dot(applied).real();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact commutator norms (the brute-force oracle)
// ---------------------------------------------------------------------------

struct CommutatorOptions {
    long dim_cap = limits::default_commutator_dim_cap;
    bool force_dense = false;
};

/// || [A(t), B] || with A(t) = exp(iHt/hbar) A exp(-iHt/hbar), by full
/// eigendecomposition. The commutator of two Hermitian operators is
/// anti-Hermitian, so the norm is the largest |eigenvalue| of i[A(t), B].
/// Splits into total-S^z sectors when H, A and B all conserve it.
inline TimeSeries commutator_norm_series(const SpinSystem& sys, const LocalOperator& a,
                                         const LocalOperator& b, const std::vector<double>& times_ps,
                                         const CommutatorOptions& opts = {},
                                         const std::string& observable_name = "commutator_norm") {
    const std::vector<int> dims = sys.dims();
    const long n = detail::checked_total_dim(dims, opts.dim_cap);

    std::vector<double> spins_a, spins_b;
    for (int s : a.support) spins_a.push_back(sys.spin_at(s));
    for (int s : b.support) spins_b.push_back(sys.spin_at(s));
    const bool split = !opts.force_dense && detail::system_conserves_sz(sys) &&
                       conserves_total_sz(a.matrix, spins_a) && conserves_total_sz(b.matrix, spins_b);

    const MatrixC h = assemble_hamiltonian(sys, opts.dim_cap);
    const MatrixC a_full = embed(a, dims, opts.dim_cap);
    const MatrixC b_full = embed(b, dims, opts.dim_cap);

    std::vector<std::vector<int>> blocks;
    if (split)
        blocks = sz_sector_indices(sys.spins);
    else {
        blocks.emplace_back();
        for (long i = 0; i < n; ++i) blocks.back().push_back(static_cast<int>(i));
    }

    struct Block {
        VectorR evals;
        MatrixC a_t0, b_rot;
    };
    std::vector<Block> prepared;
    for (const auto& idx : blocks) {
        auto eig = hermitian_eigen(detail::gather_block(h, idx));
        Block bl;
        bl.a_t0 = eig.vectors.adjoint() * detail::gather_block(a_full, idx) * eig.vectors;
        bl.b_rot = eig.vectors.adjoint() * detail::gather_block(b_full, idx) * eig.vectors;
        bl.evals = std::move(eig.values);
        prepared.push_back(std::move(bl));
    }

    TimeSeries out;
    out.times = times_ps;
    out.values.assign(times_ps.size(), 0.0);
    out.observable = observable_name;
    out.params["sector_split"] = split ? "1" : "0";

    MatrixC a_t, g, c;
    for (size_t it = 0; it < times_ps.size(); ++it) {
        const double t_nat = times_ps[it] / constants::hbar_mev_ps;
        double norm = 0.0;
        for (const auto& bl : prepared) {
            const long m = bl.evals.size();
            a_t.resize(m, m);
            for (long col = 0; col < m; ++col)
                for (long row = 0; row < m; ++row)
                    a_t(row, col) =
                        std::exp(Complex(0.0, (bl.evals(row) - bl.evals(col)) * t_nat)) * bl.a_t0(row, col);
            g.noalias() = a_t * bl.b_rot;
            c = Complex(0.0, 1.0) * (g - g.adjoint().eval()); // i [A(t), B], Hermitian
            if (c.cwiseAbs().maxCoeff() == 0.0) continue;
            const VectorR w = hermitian_eigenvalues(c);
            norm = std::max(norm, std::max(std::abs(w(0)), std::abs(w(m - 1))));
        }
        out.values[it] = norm;
    }
    return out;
}

/// A(t) for one time, dense path; used by the algebra property tests.
inline MatrixC evolve_operator_dense(const HermitianEigen& eig, const MatrixC& a_full, double t_ps) {
    const double t_nat = t_ps / constants::hbar_mev_ps;
    const long m = eig.values.size();
    MatrixC a_rot = eig.vectors.adjoint() * a_full * eig.vectors;
    for (long col = 0; col < m; ++col)
        for (long row = 0; row < m; ++row)
            a_rot(row, col) *= std::exp(Complex(0.0, (eig.values(row) - eig.values(col)) * t_nat));
    return eig.vectors * a_rot * eig.vectors.adjoint();
}

// ---------------------------------------------------------------------------
// Signal arrival and velocity summaries
// ---------------------------------------------------------------------------

/// First time |value(t) - value(0)| reaches epsilon, linearly interpolated
/// between samples; nullopt when the deviation never gets there.
inline std::optional<double> signal_arrival(const TimeSeries& series, double epsilon) {
    if (!(epsilon > 0.0)) throw domain_error("signal_arrival needs epsilon > 0");
    if (series.values.empty()) return std::nullopt;
    const double v0 = series.values.front();
    double prev_dev = 0.0;
    for (size_t i = 0; i < series.values.size(); ++i) {
        const double dev = std::abs(series.values[i] - v0);
        if (dev >= epsilon) {
            if (i == 0) return series.times.front();
            const double t0 = series.times[i - 1], t1 = series.times[i];
            if (dev > prev_dev) return t0 + (epsilon - prev_dev) / (dev - prev_dev) * (t1 - t0);
            return t1;
        }
        prev_dev = dev;
    }
    return std::nullopt;
}

struct VelocityEstimate {
    double speed_sites_per_ps = 0.0; // 1/slope of the distance -> arrival fit
    double slope_ps_per_site = 0.0;
    double intercept_ps = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
};

/// Least-squares fit of arrival time against distance over the sites with a
/// finite arrival.
inline VelocityEstimate estimate_velocity(const std::vector<double>& distances,
                                          const std::vector<std::optional<double>>& arrivals) {
    if (distances.size() != arrivals.size())
        throw domain_error("estimate_velocity needs matching distance/arrival lists");
    std::vector<double> xs, ys;
    for (size_t i = 0; i < arrivals.size(); ++i)
        if (arrivals[i]) {
            xs.push_back(distances[i]);
            ys.push_back(*arrivals[i]);
        }
    if (xs.size() < 3)
        throw insufficient_data_error("velocity fit needs at least 3 finite arrivals, have " +
                                      std::to_string(xs.size()));
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw insufficient_data_error("velocity fit is degenerate (all distances equal)");
    VelocityEstimate est;
    est.slope_ps_per_site = (n * sxy - sx * sy) / denom;
    est.intercept_ps = (sy - est.slope_ps_per_site * sx) / n;
    est.speed_sites_per_ps = (est.slope_ps_per_site != 0.0) ? 1.0 / est.slope_ps_per_site
                                                            : std::numeric_limits<double>::infinity();
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double fit = est.intercept_ps + est.slope_ps_per_site * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
    }
    est.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    est.points_used = static_cast<int>(xs.size());
    return est;
}

} // namespace lrlab
