#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "lrlab/constants.hpp"
#include "lrlab/errors.hpp"
#include "lrlab/terms.hpp"

namespace lrlab {

namespace detail {

inline bool intersects(const std::vector<int>& a, const std::vector<int>& b) {
    // both sorted
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        (a[i] < b[j]) ? ++i : ++j;
    }
    return false;
}

inline bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
    // a subset of b, both sorted
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace detail

/// Membership of a term support Z in the boundary of X:
/// Z intersects X but is not contained in X. One-body terms can never
/// qualify, which is what makes the path-sum bound independent of them.
inline bool in_boundary(const std::vector<int>& Z, const std::vector<int>& X) {
    return detail::intersects(Z, X) && !detail::is_subset(Z, X);
}

/// Indices of all terms whose support lies in the boundary of X. Terms with
/// identical supports are listed once each.
inline std::vector<int> boundary(const std::vector<int>& X, const std::vector<InteractionTerm>& terms) {
    if (X.empty()) throw domain_error("boundary of an empty site set is undefined");
    std::vector<int> xs = X;
    std::sort(xs.begin(), xs.end());
    std::vector<int> out;
    for (int t = 0; t < static_cast<int>(terms.size()); ++t)
        if (in_boundary(terms[static_cast<size_t>(t)].support, xs)) out.push_back(t);
    return out;
}

/// A chain Z_1 in dX, Z_{k+1} in dZ_k, with Z_n meeting Y. Weight is the
/// product of the chained interaction norms (meV^length).
struct Path {
    std::vector<int> term_indices;
    double weight = 1.0;

    int length() const { return static_cast<int>(term_indices.size()); }
};

struct PathEnumeration {
    std::vector<Path> paths;
    bool complete = true; // false: node budget hit, list is partial
    long long nodes_expanded = 0;
};

/// Adjacency structure over the multi-site terms: which terms can follow
/// which in a path. Stable order (original term-list order) throughout, so
/// results do not depend on the presence of one-body terms.
struct BoundaryGraph {
    std::vector<int> start;             // terms in the boundary of X
    std::vector<std::vector<int>> next; // next[t]: terms in the boundary of support(t)
    std::vector<char> meets_target;     // term support intersects Y
    std::vector<double> norms;

    BoundaryGraph(const std::vector<int>& X, const std::vector<int>& Y,
                  const std::vector<InteractionTerm>& terms) {
        std::vector<int> ys = Y;
        std::sort(ys.begin(), ys.end());
        start = boundary(X, terms);
        next.resize(terms.size());
        meets_target.assign(terms.size(), 0);
        norms.resize(terms.size());
        for (int t = 0; t < static_cast<int>(terms.size()); ++t) {
            const auto& zt = terms[static_cast<size_t>(t)];
            next[static_cast<size_t>(t)] = boundary(zt.support, terms);
            meets_target[static_cast<size_t>(t)] = detail::intersects(zt.support, ys) ? 1 : 0;
            norms[static_cast<size_t>(t)] = zt.norm;
        }
    }
};

/// Depth-first enumeration of all paths from X to Y of length <= max_length,
/// in lexicographic order of term indices.
inline PathEnumeration enumerate_paths(const std::vector<int>& X, const std::vector<int>& Y,
                                       const std::vector<InteractionTerm>& terms, int max_length,
                                       long long node_budget = limits::default_node_budget) {
    if (X.empty() || Y.empty()) throw domain_error("enumerate_paths needs nonempty X and Y");
    if (max_length < 1) throw domain_error("max_length must be >= 1");
    BoundaryGraph g(X, Y, terms);

    PathEnumeration out;
    std::vector<int> stack;
    std::vector<double> weights;

    // explicit DFS over (term, depth); recursion expressed iteratively so the
    // node budget check is one place
    struct Frame {
        int term;
        size_t next_child;
    };
    std::vector<Frame> frames;

    auto push = [&](int term, double parent_weight) -> bool {
        if (++out.nodes_expanded > node_budget) return false;
        stack.push_back(term);
        weights.push_back(parent_weight * g.norms[static_cast<size_t>(term)]);
        frames.push_back({term, 0});
        if (g.meets_target[static_cast<size_t>(term)]) {
            Path p;
            p.term_indices = stack;
            p.weight = weights.back();
            out.paths.push_back(std::move(p));
        }
        return true;
    };

    for (int first : g.start) {
        if (!push(first, 1.0)) {
            out.complete = false;
            return out;
        }
        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& kids = g.next[static_cast<size_t>(f.term)];
            if (static_cast<int>(stack.size()) >= max_length || f.next_child >= kids.size()) {
                frames.pop_back();
                stack.pop_back();
                weights.pop_back();
                continue;
            }
            const int child = kids[f.next_child++];
            const double w = weights.back();
            if (!push(child, w)) {
                out.complete = false;
                return out;
            }
        }
    }
    return out;
}

/// Replay the chaining conditions for one path (used as a validator).
inline bool path_is_valid(const Path& p, const std::vector<int>& X, const std::vector<int>& Y,
                          const std::vector<InteractionTerm>& terms) {
    if (p.term_indices.empty()) return false;
    std::vector<int> xs = X, ys = Y;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const std::vector<int>* prev = &xs;
    for (int t : p.term_indices) {
        if (t < 0 || t >= static_cast<int>(terms.size())) return false;
        if (!in_boundary(terms[static_cast<size_t>(t)].support, *prev)) return false;
        prev = &terms[static_cast<size_t>(t)].support;
    }
    return detail::intersects(*prev, ys);
}

struct PathCountBound {
    std::uint64_t value = 0;
    bool saturated = false; // true: the true value overflows uint64, `value` holds UINT64_MAX
};

/// (2(2d-1))^L, saturating at the uint64 limit.
inline PathCountBound path_count_bound(int d, int L) {
    if (d < 1) throw domain_error("lattice dimension must be >= 1");
    if (L < 0) throw domain_error("path length must be >= 0");
    const std::uint64_t base = static_cast<std::uint64_t>(2 * (2 * d - 1));
    PathCountBound out;
    out.value = 1;
    for (int i = 0; i < L; ++i) {
        if (out.value > UINT64_MAX / base) {
            out.value = UINT64_MAX;
            out.saturated = true;
            return out;
        }
        out.value *= base;
    }
    return out;
}

} // namespace lrlab
