#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrlab/constants.hpp"
#include "lrlab/errors.hpp"
#include "lrlab/format.hpp"
#include "lrlab/paths.hpp"
#include "lrlab/system.hpp"

namespace lrlab {

/// Time in "natural" units 1/meV, as it enters every bound formula.
inline double natural_time(double t_ps) { return std::abs(t_ps) / constants::hbar_mev_ps; }

// ---------------------------------------------------------------------------
// Interaction norm and the exponential (old) bound
// ---------------------------------------------------------------------------

/// Per-term factor |X| (2s+1)^{2|X|} e^{xi D(X)}; s is the largest spin on
/// the support (all shipped systems are uniform-s anyway).
inline double interaction_norm_factor(const SpinSystem& sys, const InteractionTerm& term, double xi) {
    double s_max = 0.0;
    for (int site : term.support) s_max = std::max(s_max, sys.spin_at(site));
    const double n_sites = static_cast<double>(term.body_count());
    const double multiplicity = std::pow(2.0 * s_max + 1.0, 2.0 * n_sites);
    return n_sites * multiplicity * std::exp(xi * sys.lattice.diameter(term.support));
}

/// ||Phi||_xi: sup over sites x of the weighted sum of term norms over all
/// interactions containing x. One-body terms enter exactly as the formula
/// dictates (|X| = 1, D = 0).
inline double interaction_norm_xi(const SpinSystem& sys, double xi) {
    if (!(xi > 0.0)) throw domain_error("interaction norm needs xi > 0");
    double sup = 0.0;
    for (int x = 0; x < sys.lattice.site_count(); ++x) {
        double sum = 0.0;
        for (const auto& t : sys.terms) {
            if (!std::binary_search(t.support.begin(), t.support.end(), x)) continue;
            sum += interaction_norm_factor(sys, t, xi) * t.norm;
        }
        sup = std::max(sup, sum);
    }
    return sup;
}

/// Exponential Lieb-Robinson bound 2|A||B| exp(-xi d + 2 ||Phi||_xi |t|/hbar)
/// for A = S^z_x, B = S^z_y. Clamped to the trivial commutator bound 2|A||B|
/// unless clamp = false (raw formula, for plotting).
inline double old_bound(double t_ps, int x, int y, const SpinSystem& sys, double xi,
                        bool clamp = true, std::optional<double> phi_xi = std::nullopt) {
    if (x == y) throw domain_error("old_bound needs distinct sites");
    const double norm_a = sys.spin_at(x), norm_b = sys.spin_at(y);
    const double cap = 2.0 * norm_a * norm_b;
    const double phi = phi_xi ? *phi_xi : interaction_norm_xi(sys, xi);
    const double expo = -xi * sys.lattice.distance(x, y) + 2.0 * phi * natural_time(t_ps);
    const double raw = (expo > 700.0) ? std::numeric_limits<double>::infinity() : cap * std::exp(expo);
    return clamp ? std::min(cap, raw) : raw;
}

/// Arrival time of the old bound at threshold*cap, in closed form.
/// Returns 0 when the bound already exceeds the threshold at t = 0,
/// `horizon` when it stays below it until then.
inline double old_bound_arrival(double dist, double phi_xi, double xi, double threshold, double horizon) {
    const double t = constants::hbar_mev_ps * (xi * dist + std::log(threshold)) / (2.0 * phi_xi);
    if (t <= 0.0) return 0.0;
    return std::min(t, horizon);
}

struct OptimizeXiResult {
    double xi = 1.0;
    double arrival_ps = 0.0;
    bool grid_fallback = false; // objective looked non-unimodal, used 200-point scan
};

/// Choose xi in [0.01, 10] making the old bound as late as possible at the
/// given threshold (the tightest exponential bound). Golden-section search,
/// tolerance 1e-3 in xi, with a 200-point grid fallback if the coarse scan
/// does not look unimodal.
inline OptimizeXiResult optimize_xi(const SpinSystem& sys, int x, int y, double horizon,
                                    double threshold = 0.05) {
    if (!(horizon > 0.0)) throw domain_error("optimize_xi needs a positive horizon");
    if (x == y) throw domain_error("optimize_xi needs distinct sites");
    const double dist = sys.lattice.distance(x, y);
    auto objective = [&](double xi) {
        return old_bound_arrival(dist, interaction_norm_xi(sys, xi), xi, threshold, horizon);
    };

    const double lo = 0.01, hi = 10.0;
    auto log_grid = [&](int n) {
        std::vector<double> g(static_cast<size_t>(n));
        const double llo = std::log(lo), lhi = std::log(hi);
        for (int i = 0; i < n; ++i)
            g[static_cast<size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1.0));
        return g;
    };

    const auto coarse = log_grid(64);
    std::vector<double> val(coarse.size());
    for (size_t i = 0; i < coarse.size(); ++i) val[i] = objective(coarse[i]);

    int peaks = 0;
    size_t best = 0;
    for (size_t i = 0; i < coarse.size(); ++i) {
        const bool up = (i == 0) || val[i] > val[i - 1];
        const bool down = (i + 1 == coarse.size()) || val[i] > val[i + 1];
        if (up && down) ++peaks;
        if (val[i] > val[best]) best = i;
    }

    OptimizeXiResult out;
    if (peaks != 1) {
        out.grid_fallback = true;
        const auto fine = log_grid(200);
        double fbest = -1.0;
        for (double xi : fine) {
            const double v = objective(xi);
            if (v > fbest) {
                fbest = v;
                out.xi = xi;
            }
        }
        out.arrival_ps = fbest;
        return out;
    }

    double a = coarse[best > 0 ? best - 1 : 0];
    double b = coarse[std::min(best + 1, coarse.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > 1e-3) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    out.xi = 0.5 * (a + b);
    out.arrival_ps = objective(out.xi);
    return out;
}

// ---------------------------------------------------------------------------
// Path-sum bound
// ---------------------------------------------------------------------------

/// Thrown when the node budget stops the path-sum truncation length short of
/// what the tail bound needs.
class pathsum_budget_error : public resource_error {
public:
    pathsum_budget_error(const std::string& msg, double partial, double unmet_tail, int length)
        : resource_error(msg), partial_sum(partial), unmet_tolerance(unmet_tail), truncation_length(length) {}
    double partial_sum;
    double unmet_tolerance;
    int truncation_length;
};

/// Upper bound on sum_{L > L0} a^L / L!, every step rigorous.
inline double exp_series_tail(double a, int L0) {
    if (a <= 0.0) return 0.0;
    double log_term = (L0 + 1) * std::log(a) - std::lgamma(static_cast<double>(L0 + 2));
    if (log_term > 700.0) return std::numeric_limits<double>::infinity();
    double term = std::exp(log_term);
    double sum = 0.0;
    int L = L0 + 1;
    while (true) {
        sum += term;
        ++L;
        const double ratio = a / static_cast<double>(L);
        term *= ratio;
        if (ratio <= 0.5) return sum + 2.0 * term; // geometric remainder
        if (L > L0 + 100000) return std::numeric_limits<double>::infinity();
    }
}

/// Smallest truncation length whose rigorous tail bound
/// sum_{L > L_max} (2(2d-1))^L (2 t_nat)^L w_max^L / L!  drops below tol.
inline int pathsum_required_length(int lattice_dim, double w_max, double t_nat_max, double tol) {
    const double a = 2.0 * (2.0 * lattice_dim - 1.0) * 2.0 * t_nat_max * w_max;
    if (a <= 0.0) return 1;
    int lo = 0, hi = 1;
    while (exp_series_tail(a, hi) >= tol) {
        hi *= 2;
        if (hi > 1000000) throw resource_error("path-sum tail bound does not converge below tol");
    }
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (exp_series_tail(a, mid) < tol)
            hi = mid;
        else
            lo = mid + 1;
    }
    return std::max(lo, 1);
}

/// Sum of path weights, aggregated by length: W[L] = sum over paths of
/// length L of prod ||Phi(Z_i)||. Computed by propagating partial-path
/// weights over the boundary graph, which is the same sum the depth-first
/// enumeration produces, term by term, just grouped by endpoint.
/// Only multi-site terms ever enter a boundary, so one-body interactions
/// cannot influence any W[L].
struct PathSumEvaluator {
    std::vector<double> weight_by_length; // index L, [0] unused
    bool includes_length_zero = false;    // X and Y intersect
    int lattice_dim = 1;
    double w_max = 0.0;
    double tol = 1e-9;
    int target_length = 1;     // length the tail bound asked for
    bool budget_hit = false;   // weights stop before target_length
    long long nodes_used = 0;

    PathSumEvaluator(const std::vector<int>& X, const std::vector<int>& Y, const SpinSystem& sys,
                     double t_nat_max, double tolerance,
                     long long node_budget = limits::default_node_budget)
        : lattice_dim(sys.lattice.dim), tol(tolerance) {
        if (X.empty() || Y.empty()) throw domain_error("path sum needs nonempty X and Y");
        if (!(tolerance > 0.0)) throw domain_error("path-sum tolerance must be positive");
        std::vector<int> xs = X, ys = Y;
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        includes_length_zero = detail::intersects(xs, ys);

        for (const auto& t : sys.terms)
            if (t.body_count() >= 2) w_max = std::max(w_max, t.norm);
        target_length = pathsum_required_length(lattice_dim, w_max, t_nat_max, tolerance);

        BoundaryGraph g(xs, ys, sys.terms);
        const size_t n_terms = sys.terms.size();
        std::vector<double> u(n_terms, 0.0), u_next(n_terms, 0.0);
        weight_by_length.assign(static_cast<size_t>(target_length) + 1, 0.0);

        for (int t : g.start) u[static_cast<size_t>(t)] = g.norms[static_cast<size_t>(t)];
        for (int L = 1; L <= target_length; ++L) {
            double w = 0.0;
            bool alive = false;
            for (size_t t = 0; t < n_terms; ++t) {
                if (u[t] == 0.0) continue;
                alive = true;
                if (g.meets_target[t]) w += u[t];
            }
            weight_by_length[static_cast<size_t>(L)] = w;
            if (!alive) break;
            if (L == target_length) break;
            std::fill(u_next.begin(), u_next.end(), 0.0);
            for (size_t t = 0; t < n_terms; ++t) {
                if (u[t] == 0.0) continue;
                for (int t2 : g.next[t]) {
                    nodes_used += 1;
                    u_next[static_cast<size_t>(t2)] += u[t] * g.norms[static_cast<size_t>(t2)];
                }
            }
            if (nodes_used > node_budget) {
                budget_hit = true;
                weight_by_length.resize(static_cast<size_t>(L) + 1);
                break;
            }
            u.swap(u_next);
        }
    }

    int truncation_length() const { return static_cast<int>(weight_by_length.size()) - 1; }

    /// 2 |A| sum over paths, truncated; throws if the budget-truncated length
    /// cannot meet the tail tolerance at this time.
    double value(double t_ps, double norm_a, bool clamp = false, double cap = 0.0) const {
        const double t_nat = natural_time(t_ps);
        if (budget_hit) {
            const double a = 2.0 * (2.0 * lattice_dim - 1.0) * 2.0 * t_nat * w_max;
            const double tail = exp_series_tail(a, truncation_length());
            if (tail >= tol) {
                const double partial = unclamped_value(t_nat, norm_a);
                throw pathsum_budget_error(
                    "path-sum node budget exhausted at length " + std::to_string(truncation_length()) +
                        "; tail bound " + fmt17(tail) + " misses tol " + fmt17(tol),
                    partial, tail, truncation_length());
            }
        }
        const double raw = unclamped_value(t_nat, norm_a);
        return clamp ? std::min(raw, cap) : raw;
    }

private:
    double unclamped_value(double t_nat, double norm_a) const {
        double sum = includes_length_zero ? 1.0 : 0.0;
        double coeff = 1.0; // (2 t_nat)^L / L!
        for (int L = 1; L <= truncation_length(); ++L) {
            coeff *= 2.0 * t_nat / static_cast<double>(L);
            sum += coeff * weight_by_length[static_cast<size_t>(L)];
        }
        return 2.0 * norm_a * sum;
    }
};

/// One-shot evaluation of the path-sum bound at a single time.
inline double new_bound_pathsum(double t_ps, const std::vector<int>& X, const std::vector<int>& Y,
                                const SpinSystem& sys, double tol, double norm_a,
                                long long node_budget = limits::default_node_budget) {
    PathSumEvaluator ev(X, Y, sys, natural_time(t_ps), tol, node_budget);
    return ev.value(t_ps, norm_a);
}

// ---------------------------------------------------------------------------
// Closed-form nearest-neighbor bound and the perturbation-related bound
// ---------------------------------------------------------------------------

/// Limit speed v = 4 e (2d-1) J s^2 of the closed-form bound (meV).
inline double closed_form_speed(double J, double s, int lattice_dim = 1) {
    return 4.0 * constants::euler_e * (2.0 * lattice_dim - 1.0) * J * s * s;
}

/// Closed-form nearest-neighbor bound s^2 (v |t|/hbar / dist)^dist, clamped
/// at the trivial bound 2 s^2 unless clamp = false.
inline double new_bound_1d(double t_ps, int dist, double J, double s, int lattice_dim = 1,
                           bool clamp = true) {
    if (dist < 1) throw domain_error("new_bound_1d needs distance >= 1 (use the trivial bound at 0)");
    const double cap = 2.0 * s * s;
    const double x = closed_form_speed(J, s, lattice_dim) * natural_time(t_ps) / static_cast<double>(dist);
    double raw;
    if (x <= 0.0)
        raw = 0.0;
    else {
        const double log_raw = 2.0 * std::log(s) + dist * std::log(x);
        raw = (log_raw > 700.0) ? std::numeric_limits<double>::infinity() : std::exp(log_raw);
    }
    return clamp ? std::min(raw, cap) : raw;
}

/// Perturbation-related bound |A| d/dlambda (e^{lambda t} - 1)/lambda at
/// lambda = 2||P||, time in natural units. Below lambda*t < 1e-6 the
/// Taylor limit |A| t^2/2 is used.
inline double tilde_bound(double t_ps, double norm_p, double norm_a) {
    if (t_ps < 0.0) throw domain_error("tilde_bound needs t >= 0");
    if (!(norm_p > 0.0)) throw domain_error("tilde_bound needs ||P|| > 0");
    const double t_nat = natural_time(t_ps);
    const double lambda = 2.0 * norm_p;
    const double x = lambda * t_nat;
    if (x < 1e-6) return norm_a * 0.5 * t_nat * t_nat;
    if (x > 700.0) return std::numeric_limits<double>::infinity();
    const double ex = std::exp(x);
    return norm_a * (x * ex - ex + 1.0) / (lambda * lambda);
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double rel_tol) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double eps = std::max(std::abs(whole), 1e-300) * rel_tol;
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 40);
}

} // namespace detail

/// Alternate form of the related bound: the convolution
/// integral_0^t B(t') e^{lambda (t - t')} dt' in natural time, with B the
/// path-sum/closed-form bound between the perturbation site and the
/// observable site. Kept alongside the closed form because the two are not
/// obviously equal; the report compares them.
inline double tilde_bound_conv(double t_ps, double norm_p,
                               const std::function<double(double)>& bound_at_natural_time,
                               double rel_tol = 1e-8) {
    if (t_ps < 0.0) throw domain_error("tilde_bound_conv needs t >= 0");
    const double t_nat = natural_time(t_ps);
    const double lambda = 2.0 * norm_p;
    auto integrand = [&](double u) {
        const double ex = lambda * (t_nat - u);
        return bound_at_natural_time(u) * ((ex > 700.0) ? std::numeric_limits<double>::infinity() : std::exp(ex));
    };
    return detail::integrate_adaptive(integrand, 0.0, t_nat, rel_tol);
}

// ---------------------------------------------------------------------------
// Sampled curves and arrival times
// ---------------------------------------------------------------------------

enum class BoundKind { old_L, new_B_pathsum, new_B_1d, tilde_B, tilde_B_conv };

inline const char* bound_kind_name(BoundKind k) {
    switch (k) {
        case BoundKind::old_L: return "old_L";
        case BoundKind::new_B_pathsum: return "new_B_pathsum";
        case BoundKind::new_B_1d: return "new_B_1d";
        case BoundKind::tilde_B: return "tilde_B";
        case BoundKind::tilde_B_conv: return "tilde_B_conv";
    }
    return "?";
}

/// Sampled bound curve with full provenance. `cap` is the trivial value the
/// arrival criterion is measured against; `evaluate` (when set) is the
/// closed-form continuation used to refine arrival times by bisection.
struct BoundCurve {
    BoundKind kind = BoundKind::old_L;
    std::vector<double> times;  // ps, strictly increasing
    std::vector<double> values; // dimensionless operator-norm units
    double cap = 0.0;
    std::map<std::string, std::string> params;
    std::function<double(double)> evaluate;
};

struct ArrivalResult {
    std::optional<double> t_ps; // nullopt: threshold not reached on the grid
    double threshold_value = 0.0;
};

/// First time the curve reaches threshold_fraction * cap. Grid scan plus
/// bisection to 1e-4 ps when the curve carries its closed form, linear
/// interpolation otherwise.
inline ArrivalResult arrival_time(const BoundCurve& curve, double threshold_fraction) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw domain_error("arrival threshold fraction must be in (0,1)");
    ArrivalResult out;
    const double thresh = threshold_fraction * curve.cap;
    out.threshold_value = thresh;
    if (!(thresh > 0.0)) throw domain_error("arrival threshold is not positive; curve cap missing");
    size_t hit = curve.values.size();
    for (size_t i = 0; i < curve.values.size(); ++i)
        if (curve.values[i] >= thresh) {
            hit = i;
            break;
        }
    if (hit == curve.values.size()) return out; // beyond horizon
    if (hit == 0) {
        out.t_ps = curve.times.front();
        return out;
    }
    double lo = curve.times[hit - 1], hi = curve.times[hit];
    if (curve.evaluate) {
        while (hi - lo > 1e-4) {
            const double mid = 0.5 * (lo + hi);
            (curve.evaluate(mid) >= thresh ? hi : lo) = mid;
        }
        out.t_ps = 0.5 * (lo + hi);
    } else {
        const double v0 = curve.values[hit - 1], v1 = curve.values[hit];
        out.t_ps = (v1 > v0) ? lo + (thresh - v0) / (v1 - v0) * (hi - lo) : hi;
    }
    return out;
}

} // namespace lrlab
