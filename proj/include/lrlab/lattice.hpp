#pragma once

#include <array>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "lrlab/errors.hpp"

namespace lrlab {

/// Finite hypercubic lattice, d = 1 or 2. Sites are indexed 0..count-1 in
/// row-major order; the metric is the graph (Manhattan) distance.
struct Lattice {
    int dim = 1;
    std::array<int, 2> extent = {1, 1}; // extent[1] unused for dim == 1

    Lattice() = default;
    Lattice(int d, std::array<int, 2> ext) : dim(d), extent(ext) {
        if (dim != 1 && dim != 2) throw domain_error("lattice dimension must be 1 or 2");
        if (extent[0] < 1 || (dim == 2 && extent[1] < 1))
            throw domain_error("lattice extent must be >= 1 in every dimension");
        if (dim == 1) extent[1] = 1;
    }

    static Lattice chain(int n) { return Lattice(1, {n, 1}); }
    static Lattice grid(int nx, int ny) { return Lattice(2, {nx, ny}); }

    int site_count() const { return extent[0] * extent[1]; }

    bool contains(int site) const { return site >= 0 && site < site_count(); }

    std::array<int, 2> coords(int site) const {
        if (!contains(site)) throw domain_error("site " + std::to_string(site) + " is outside the lattice");
        return {site / extent[1], site % extent[1]};
    }

    int index(std::array<int, 2> c) const { return c[0] * extent[1] + c[1]; }

    int distance(int a, int b) const {
        const auto ca = coords(a), cb = coords(b);
        return std::abs(ca[0] - cb[0]) + std::abs(ca[1] - cb[1]);
    }

    /// Maximum pairwise distance within a site set (0 for singletons).
    int diameter(const std::vector<int>& sites) const {
        int d = 0;
        for (size_t i = 0; i < sites.size(); ++i)
            for (size_t j = i + 1; j < sites.size(); ++j)
                d = std::max(d, distance(sites[i], sites[j]));
        return d;
    }

    /// All nearest-neighbor bonds {a, b} with a < b, deterministic order.
    std::vector<std::pair<int, int>> nearest_neighbor_bonds() const {
        std::vector<std::pair<int, int>> bonds;
        for (int s = 0; s < site_count(); ++s) {
            const auto c = coords(s);
            if (c[0] + 1 < extent[0]) bonds.emplace_back(s, index({c[0] + 1, c[1]}));
            if (dim == 2 && c[1] + 1 < extent[1]) bonds.emplace_back(s, index({c[0], c[1] + 1}));
        }
        std::sort(bonds.begin(), bonds.end());
        return bonds;
    }
};

} // namespace lrlab
