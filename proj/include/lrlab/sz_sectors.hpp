#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "lrlab/local_operator.hpp"
#include "lrlab/spin.hpp"
#include "lrlab/terms.hpp"

namespace lrlab {

/// Total magnetization sum_i m_i of every product-basis state, as the integer
/// 2M (to keep half-integer spins exact).
inline std::vector<int> two_m_total_per_state(const std::vector<double>& spins) {
    std::vector<int> dims;
    dims.reserve(spins.size());
    long n = 1;
    for (double s : spins) {
        dims.push_back(spin_dim(s));
        n *= dims.back();
    }
    std::vector<int> two_m(static_cast<size_t>(n), 0);
    for (long idx = 0; idx < n; ++idx) {
        long rem = idx;
        int acc = 0;
        for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
            const int digit = static_cast<int>(rem % dims[static_cast<size_t>(k)]);
            rem /= dims[static_cast<size_t>(k)];
            acc += static_cast<int>(std::lround(2.0 * spins[static_cast<size_t>(k)])) - 2 * digit;
        }
        two_m[static_cast<size_t>(idx)] = acc;
    }
    return two_m;
}

/// Does an operator on the given support commute with total S^z there?
/// Checked structurally: every matrix entry connecting different local
/// magnetization totals must be exactly zero (spin-ladder cancellations are
/// exact in floating point, so no tolerance is needed; a false negative only
/// costs speed, never correctness).
inline bool conserves_total_sz(const MatrixC& matrix, const std::vector<double>& support_spins) {
    const auto two_m = two_m_total_per_state(support_spins);
    const long d = matrix.rows();
    for (long c = 0; c < d; ++c)
        for (long r = 0; r < d; ++r)
            if (two_m[static_cast<size_t>(r)] != two_m[static_cast<size_t>(c)] &&
                matrix(r, c) != Complex(0.0, 0.0))
                return false;
    return true;
}

inline bool conserves_total_sz(const InteractionTerm& term, const std::vector<double>& spins) {
    std::vector<double> sup_spins;
    sup_spins.reserve(term.support.size());
    for (int site : term.support) sup_spins.push_back(spins[static_cast<size_t>(site)]);
    return conserves_total_sz(term.matrix, sup_spins);
}

/// Partition of the product basis into total-S^z sectors, ordered by
/// decreasing magnetization; state indices ascending inside each sector.
inline std::vector<std::vector<int>> sz_sector_indices(const std::vector<double>& spins) {
    const auto two_m = two_m_total_per_state(spins);
    std::map<int, std::vector<int>, std::greater<int>> buckets;
    for (size_t i = 0; i < two_m.size(); ++i) buckets[two_m[i]].push_back(static_cast<int>(i));
    std::vector<std::vector<int>> out;
    out.reserve(buckets.size());
    for (auto& [m2, idx] : buckets) out.push_back(std::move(idx));
    return out;
}

} // namespace lrlab
