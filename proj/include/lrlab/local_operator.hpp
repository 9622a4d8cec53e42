#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrlab/constants.hpp"
#include "lrlab/errors.hpp"
#include "lrlab/spin.hpp"

namespace lrlab {

/// Dense operator together with the lattice sites it acts on. The matrix
/// lives on the tensor product of the support sites' local spaces, support
/// sites in ascending order, first support site most significant.
struct LocalOperator {
    std::vector<int> support; // strictly ascending, no duplicates
    MatrixC matrix;

    LocalOperator() = default;
    LocalOperator(std::vector<int> supp, MatrixC m) : support(std::move(supp)), matrix(std::move(m)) {
        if (!std::is_sorted(support.begin(), support.end()) ||
            std::adjacent_find(support.begin(), support.end()) != support.end())
            throw domain_error("LocalOperator support must be strictly ascending without duplicates");
        if (matrix.rows() != matrix.cols())
            throw domain_error("LocalOperator matrix must be square");
    }
};

namespace detail {

inline long checked_total_dim(const std::vector<int>& dims, long cap) {
    long total = 1;
    for (int d : dims) {
        if (d <= 0) throw domain_error("local dimension must be positive");
        if (total > cap / d) throw resource_error("Hilbert dimension exceeds cap " + std::to_string(cap));
        total *= d;
    }
    return total;
}

/// Strides of each site in the full-space index (site 0 most significant).
inline std::vector<long> site_strides(const std::vector<int>& dims) {
    std::vector<long> stride(dims.size());
    long acc = 1;
    for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
        stride[i] = acc;
        acc *= dims[i];
    }
    return stride;
}

struct EmbedLayout {
    long dim_full = 1;
    long dim_support = 1;
    std::vector<long> support_offsets; // full-index offset of each support-space index
    std::vector<long> rest_offsets;    // full-index offset of each off-support configuration
};

inline EmbedLayout embed_layout(const std::vector<int>& support, const std::vector<int>& dims, long cap) {
    for (int site : support)
        if (site < 0 || site >= static_cast<int>(dims.size()))
            throw domain_error("operator support site " + std::to_string(site) + " is outside the lattice");

    EmbedLayout lay;
    lay.dim_full = checked_total_dim(dims, cap);
    const std::vector<long> stride = site_strides(dims);

    for (int site : support) lay.dim_support *= dims[site];

    lay.support_offsets.assign(static_cast<size_t>(lay.dim_support), 0);
    for (long idx = 0; idx < lay.dim_support; ++idx) {
        long rem = idx, off = 0;
        for (int k = static_cast<int>(support.size()) - 1; k >= 0; --k) {
            const int d = dims[support[k]];
            off += (rem % d) * stride[support[k]];
            rem /= d;
        }
        lay.support_offsets[static_cast<size_t>(idx)] = off;
    }

    std::vector<int> rest;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i)
        if (!std::binary_search(support.begin(), support.end(), i)) rest.push_back(i);

    long dim_rest = lay.dim_full / lay.dim_support;
    lay.rest_offsets.assign(static_cast<size_t>(dim_rest), 0);
    for (long idx = 0; idx < dim_rest; ++idx) {
        long rem = idx, off = 0;
        for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
            const int d = dims[rest[k]];
            off += (rem % d) * stride[rest[k]];
            rem /= d;
        }
        lay.rest_offsets[static_cast<size_t>(idx)] = off;
    }
    return lay;
}

} // namespace detail

/// Kronecker-embed a local operator into the full space of a lattice with the
/// given per-site dimensions: identity on every site outside the support.
inline MatrixC embed(const LocalOperator& op, const std::vector<int>& dims,
                     long dim_cap = limits::max_hilbert_dim()) {
    const auto lay = detail::embed_layout(op.support, dims, dim_cap);
    if (op.matrix.rows() != lay.dim_support)
        throw domain_error("LocalOperator matrix dimension " + std::to_string(op.matrix.rows()) +
                           " does not match support dimension " + std::to_string(lay.dim_support));
    MatrixC full = MatrixC::Zero(lay.dim_full, lay.dim_full);
    for (long c = 0; c < lay.dim_support; ++c)
        for (long r = 0; r < lay.dim_support; ++r) {
            const Complex v = op.matrix(r, c);
            if (v == Complex(0.0, 0.0)) continue;
            const long ro = lay.support_offsets[static_cast<size_t>(r)];
            const long co = lay.support_offsets[static_cast<size_t>(c)];
            for (long rest : lay.rest_offsets) full(ro + rest, co + rest) += v;
        }
    return full;
}

/// y += embed(op) * x without forming the embedded matrix.
inline void apply_local_add(const LocalOperator& op, const std::vector<int>& dims,
                            const VectorC& x, VectorC& y,
                            long dim_cap = limits::max_hilbert_dim()) {
    const auto lay = detail::embed_layout(op.support, dims, dim_cap);
    if (x.size() != lay.dim_full || y.size() != lay.dim_full)
        throw domain_error("apply_local_add: vector length does not match lattice dimension");
    VectorC xs(lay.dim_support), ys(lay.dim_support);
    for (long rest : lay.rest_offsets) {
        for (long c = 0; c < lay.dim_support; ++c)
            xs(c) = x(lay.support_offsets[static_cast<size_t>(c)] + rest);
        ys.noalias() = op.matrix * xs;
        for (long r = 0; r < lay.dim_support; ++r)
            y(lay.support_offsets[static_cast<size_t>(r)] + rest) += ys(r);
    }
}

} // namespace lrlab
