#pragma once

#include <cstdlib>
#include <string>

namespace lrlab {

// Unit system: energies in meV, times in ps, magnetic fields in tesla,
// temperatures in kelvin. Spin matrices are dimensionless (units of hbar).
namespace constants {

/// hbar in meV*ps. Dividing a time in ps by this gives "natural" time in 1/meV.
inline constexpr double hbar_mev_ps = 0.6582119569;

/// Bohr magneton in meV/T.
inline constexpr double mu_bohr_mev_per_tesla = 0.05788;

/// Boltzmann constant in meV/K.
inline constexpr double k_boltzmann_mev_per_kelvin = 0.0861733;

inline constexpr double euler_e = 2.718281828459045235;

} // namespace constants

namespace limits {

/// Hard cap on the total Hilbert dimension (overridable with LRLAB_MAX_DIM).
inline constexpr long default_max_hilbert_dim = 20000;

/// Default cap for the exact commutator-norm oracle.
inline constexpr long default_commutator_dim_cap = 4096;

/// Default node budget for path enumeration / path-sum truncation work.
inline constexpr long long default_node_budget = 10'000'000;

/// Largest dimension for which dense eigendecomposition is the default
/// time-evolution method.
inline constexpr long default_dense_evolve_dim = 8192;

inline long max_hilbert_dim() {
    if (const char* env = std::getenv("LRLAB_MAX_DIM")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return default_max_hilbert_dim;
}

} // namespace limits

} // namespace lrlab
