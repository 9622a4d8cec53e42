#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lrlab/bounds.hpp"

using namespace lrlab;
using Catch::Approx;

namespace {

SpinSystem paper_chain(int n, double s, double j) {
    SpinSystem sys(Lattice::chain(n), s);
    sys.add_nn_heisenberg(j);
    return sys;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1.0);
    return t;
}

} // namespace

TEST_CASE("per-bond interaction factor |X|(2s+1)^{2|X|} e^{xi D}", "[bounds]") {
    const auto sys = paper_chain(3, 0.5, 1.0);
    const double factor = interaction_norm_factor(sys, sys.terms[0], 1.0);
    CHECK(factor == Approx(32.0 * constants::euler_e).epsilon(1e-14)); // 86.985...
    // rounds to 86.99 at 4 significant digits
    CHECK(std::llround(factor * 100.0) == 8699);
}

TEST_CASE("interaction norm of nearest-neighbor chains", "[bounds]") {
    SECTION("interior site of the 100-site s=1/2 J=1 chain counts two bonds") {
        const auto sys = paper_chain(100, 0.5, 1.0);
        CHECK(interaction_norm_xi(sys, 1.0) == Approx(48.0 * constants::euler_e).epsilon(1e-12)); // 130.48
    }
    SECTION("a single bond is seen once from either site") {
        const auto sys = paper_chain(2, 0.5, 1.0);
        CHECK(interaction_norm_xi(sys, 1.0) == Approx(24.0 * constants::euler_e).epsilon(1e-12));
    }
    SECTION("one-body terms enter with |X| = 1, D = 0") {
        auto sys = paper_chain(2, 0.5, 1.0);
        const double before = interaction_norm_xi(sys, 1.0);
        sys.add_anisotropy_all(2.0); // (S^z)^2 = I/4 for s=1/2, norm 0.5
        const double expected_extra = 1.0 * 4.0 * 1.0 * 0.5; // |X| (2s+1)^2 e^0 K/4
        CHECK(interaction_norm_xi(sys, 1.0) == Approx(before + expected_extra).epsilon(1e-12));
    }
    SECTION("xi <= 0 is rejected") {
        const auto sys = paper_chain(2, 0.5, 1.0);
        CHECK_THROWS_AS(interaction_norm_xi(sys, 0.0), domain_error);
    }
}

TEST_CASE("old exponential bound", "[bounds]") {
    const auto sys = paper_chain(100, 0.5, 1.0);
    const double phi = interaction_norm_xi(sys, 1.0);

    SECTION("t = 0 value is 2 s^2 e^{-xi dist}") {
        const double v = old_bound(0.0, 0, 99, sys, 1.0, false, phi);
        CHECK(v == Approx(0.5 * std::exp(-99.0)).epsilon(1e-12));
    }
    SECTION("monotone increasing and clamped at 2 s^2") {
        double prev = -1.0;
        for (double t : linspace(0.0, 1.0, 40)) {
            const double v = old_bound(t, 0, 99, sys, 1.0, true, phi);
            CHECK(v >= prev);
            CHECK(v <= 0.5 + 1e-15);
            prev = v;
        }
    }
    SECTION("x == y is rejected") {
        CHECK_THROWS_AS(old_bound(1.0, 3, 3, sys, 1.0), domain_error);
    }
    SECTION("closed-form arrival matches the sampled curve") {
        const double arr = old_bound_arrival(99.0, phi, 1.0, 0.05, 100.0);
        BoundCurve curve;
        curve.kind = BoundKind::old_L;
        curve.times = linspace(0.0, 1.0, 2001);
        curve.cap = 0.5;
        for (double t : curve.times) curve.values.push_back(old_bound(t, 0, 99, sys, 1.0, true, phi));
        curve.evaluate = [&](double t) { return old_bound(t, 0, 99, sys, 1.0, true, phi); };
        const auto a = arrival_time(curve, 0.05);
        REQUIRE(a.t_ps.has_value());
        CHECK(*a.t_ps == Approx(arr).margin(2e-4));
    }
}

TEST_CASE("xi optimization lands near 1 for the paper chain", "[bounds]") {
    const auto sys = paper_chain(100, 0.5, 1.0);
    const auto res = optimize_xi(sys, 0, 99, 100.0);
    CHECK_FALSE(res.grid_fallback);
    CHECK(res.xi > 0.8);
    CHECK(res.xi < 1.2);
    CHECK(res.arrival_ps == Approx(0.2447).margin(0.01)); // frozen from the closed form
    CHECK(res.arrival_ps > 0.15);
    CHECK(res.arrival_ps < 0.40);

    SECTION("scaling all interaction norms leaves xi* unchanged") {
        const auto doubled = paper_chain(100, 0.5, 2.0);
        const auto res2 = optimize_xi(doubled, 0, 99, 100.0);
        CHECK(res2.xi == Approx(res.xi).margin(2e-3));
        CHECK(res2.arrival_ps == Approx(0.5 * res.arrival_ps).epsilon(1e-6));
    }
    SECTION("degenerate sites are rejected") {
        CHECK_THROWS_AS(optimize_xi(sys, 5, 5, 100.0), domain_error);
    }
}

TEST_CASE("rigorous exponential-series tail bound", "[bounds]") {
    for (double a : {0.5, 3.0, 20.0}) {
        for (int L0 : {0, 5, 30}) {
            const double bound_val = exp_series_tail(a, L0);
            // brute-force remainder
            double term = 1.0, partial = 0.0;
            for (int L = 1; L <= L0; ++L) term *= a / L;
            double rem = 0.0, tl = term;
            for (int L = L0 + 1; L <= L0 + 400; ++L) {
                tl *= a / L;
                rem += tl;
            }
            (void)partial;
            CHECK(bound_val >= rem);
            CHECK(bound_val <= rem * 4.0 + 1e-300); // not wildly loose
        }
    }
}

TEST_CASE("path-sum bound on small chains", "[bounds]") {
    const auto sys3 = paper_chain(3, 0.5, 1.0);

    SECTION("t = 0 with disjoint supports vanishes") {
        CHECK(new_bound_pathsum(0.0, {0}, {2}, sys3, 1e-9, 0.5) == 0.0);
    }
    SECTION("intersecting supports contribute the constant 2|A| at t = 0") {
        CHECK(new_bound_pathsum(0.0, {0}, {0}, sys3, 1e-9, 0.5) == Approx(1.0));
    }
    SECTION("leading term on the 3-site chain") {
        const double t_ps = 0.002;
        const double t_nat = natural_time(t_ps);
        const double leading = 2.0 * 0.5 * (2.0 * t_nat) * (2.0 * t_nat) / 2.0 * (0.75 * 0.75);
        const double full = new_bound_pathsum(t_ps, {0}, {2}, sys3, 1e-12, 0.5);
        CHECK(full == Approx(leading).epsilon(1e-4)); // higher orders enter at (2t w)^2 relative
        CHECK(full >= leading);                        // all terms are nonnegative
    }
    SECTION("closed form on the 3-site chain: cosh(2 t w) - 1") {
        // only one chain of boundary hops exists, so the whole series is
        // sum_k (2t)^{2k} w^{2k} / (2k)! with w = 0.75
        const double t_ps = 0.15;
        const double x = 2.0 * natural_time(t_ps) * 0.75;
        CHECK(new_bound_pathsum(t_ps, {0}, {2}, sys3, 1e-13, 0.5) ==
              Approx(std::cosh(x) - 1.0).epsilon(1e-10));
    }
}

TEST_CASE("path-sum evaluator agrees with explicit path enumeration", "[bounds]") {
    SpinSystem sys(Lattice::chain(4), 0.5);
    sys.add_nn_heisenberg(1.0);
    sys.add_anisotropy_all(2.0); // one-body terms must not disturb anything

    const double t_ps = 0.1;
    const double t_nat = natural_time(t_ps);
    PathSumEvaluator ev({0}, {3}, sys, t_nat, 1e-6);
    REQUIRE_FALSE(ev.budget_hit);

    const auto res = enumerate_paths({0}, {3}, sys.terms, ev.truncation_length());
    REQUIRE(res.complete);
    double by_enumeration = 0.0;
    for (const auto& p : res.paths) {
        double coeff = 1.0;
        for (int L = 1; L <= p.length(); ++L) coeff *= 2.0 * t_nat / L;
        by_enumeration += coeff * p.weight;
    }
    by_enumeration *= 2.0 * 0.5;

    CHECK(ev.value(t_ps, 0.5) == Approx(by_enumeration).epsilon(1e-12));
}

TEST_CASE("path-sum outputs are bit-identical under one-body terms", "[bounds]") {
    SpinSystem bare(Lattice::chain(5), 1.0);
    bare.add_nn_heisenberg(1.0);

    SpinSystem dressed(Lattice::chain(5), 1.0);
    dressed.add_nn_heisenberg(1.0);
    dressed.add_anisotropy_all(2.0);
    dressed.add_zeeman_all(2.0, {0.4, 0.0, 1.0});
    dressed.add_term(tip_term_from_norm(2, {0, 0, 1}, 4.0, 1.0));

    const double t_nat = natural_time(2.0);
    PathSumEvaluator ev_bare({0}, {4}, bare, t_nat, 1e-8);
    PathSumEvaluator ev_dressed({0}, {4}, dressed, t_nat, 1e-8);

    REQUIRE(ev_bare.weight_by_length.size() == ev_dressed.weight_by_length.size());
    for (size_t i = 0; i < ev_bare.weight_by_length.size(); ++i)
        CHECK(ev_bare.weight_by_length[i] == ev_dressed.weight_by_length[i]); // exact
    for (double t : {0.0, 0.3, 1.1, 2.0})
        CHECK(ev_bare.value(t, 1.0) == ev_dressed.value(t, 1.0)); // exact
}

TEST_CASE("path-sum node budget failure carries the partial sum", "[bounds]") {
    SpinSystem sys(Lattice::chain(20), 0.5);
    sys.add_nn_heisenberg(1.0);
    PathSumEvaluator ev({0}, {19}, sys, natural_time(20.0), 1e-12, /*node_budget=*/50);
    REQUIRE(ev.budget_hit);
    CHECK(ev.value(0.0, 0.5) == 0.0); // tail vanishes at t = 0 regardless
    try {
        (void)ev.value(20.0, 0.5);
        FAIL("expected pathsum_budget_error");
    } catch (const pathsum_budget_error& e) {
        CHECK(e.partial_sum >= 0.0);
        CHECK(e.unmet_tolerance > 1e-12);
        CHECK(e.truncation_length >= 1);
    }
}

TEST_CASE("closed-form nearest-neighbor bound", "[bounds]") {
    SECTION("v = e meV for s=1/2, d=1, J=1") {
        CHECK(closed_form_speed(1.0, 0.5, 1) == Approx(constants::euler_e).epsilon(1e-14));
    }
    SECTION("t = 0 vanishes") {
        CHECK(new_bound_1d(0.0, 100, 1.0, 0.5) == 0.0);
    }
    SECTION("dist = 0 is rejected") {
        CHECK_THROWS_AS(new_bound_1d(1.0, 0, 1.0, 0.5), domain_error);
    }
    SECTION("clamped at 2 s^2") {
        CHECK(new_bound_1d(1e6, 3, 1.0, 0.5) == Approx(0.5));
        CHECK(new_bound_1d(1e6, 3, 1.0, 0.5, 1, false) > 1e10);
    }
    SECTION("arrival near 23.7 ps for dist=100 at threshold 0.05") {
        BoundCurve curve;
        curve.kind = BoundKind::new_B_1d;
        curve.times = linspace(0.0, 40.0, 801);
        curve.cap = 0.5;
        for (double t : curve.times) curve.values.push_back(new_bound_1d(t, 100, 1.0, 0.5));
        curve.evaluate = [](double t) { return new_bound_1d(t, 100, 1.0, 0.5); };
        const auto a = arrival_time(curve, 0.05);
        REQUIRE(a.t_ps.has_value());
        // frozen: t = 100*hbar*0.1^(1/100)/e
        CHECK(*a.t_ps == Approx(23.6627).margin(2e-3));
        CHECK(*a.t_ps > 18.0);
        CHECK(*a.t_ps < 30.0);
    }
}

TEST_CASE("perturbation-related bound", "[bounds]") {
    SECTION("t = 0 vanishes") {
        CHECK(tilde_bound(0.0, 2.0, 1.0) == 0.0);
    }
    SECTION("negative t is rejected") {
        CHECK_THROWS_AS(tilde_bound(-1.0, 2.0, 1.0), domain_error);
    }
    SECTION("small-lambda limit is |A| t^2/2") {
        const double t_ps = 0.01;
        const double t_nat = natural_time(t_ps);
        CHECK(tilde_bound(t_ps, 1e-9, 1.0) == Approx(0.5 * t_nat * t_nat).epsilon(1e-9));
    }
    SECTION("pointwise increasing in ||P||") {
        for (double t : {0.05, 0.5, 2.0, 10.0}) {
            double prev = -1.0;
            for (double p : {0.5, 1.0, 2.0, 4.0}) {
                const double v = tilde_bound(t, p, 1.0);
                CHECK(v > prev);
                prev = v;
            }
        }
    }
    SECTION("closed form equals integral_0^t u e^{lambda u} du") {
        // d/dlambda (e^{lambda t}-1)/lambda == integral_0^t u e^{lambda u} du,
        // which is the related-bound convolution with B(t') |-> (t - t')
        for (double t : {0.1, 1.0, 3.0}) {
            for (double p : {0.5, 2.0}) {
                const double t_nat = natural_time(t);
                const double lambda = 2.0 * p;
                const double quad = detail::integrate_adaptive(
                    [&](double u) { return u * std::exp(lambda * u); }, 0.0, t_nat, 1e-10);
                CHECK(quad == Approx(tilde_bound(t, p, 1.0)).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("arrival detection on sampled curves", "[bounds]") {
    SECTION("constant zero stays beyond the horizon") {
        BoundCurve curve;
        curve.times = linspace(0.0, 5.0, 50);
        curve.values.assign(50, 0.0);
        curve.cap = 1.0;
        CHECK_FALSE(arrival_time(curve, 0.05).t_ps.has_value());
    }
    SECTION("bisection refines to 1e-4 ps") {
        BoundCurve curve;
        curve.times = linspace(0.0, 2.0, 11);
        curve.cap = 1.0;
        for (double t : curve.times) curve.values.push_back(t * t / 4.0);
        curve.evaluate = [](double t) { return t * t / 4.0; };
        const auto a = arrival_time(curve, 0.09); // threshold 0.09 -> t = 0.6
        REQUIRE(a.t_ps.has_value());
        CHECK(*a.t_ps == Approx(0.6).margin(1.5e-4));
    }
    SECTION("bad threshold fractions are rejected") {
        BoundCurve curve;
        curve.times = {0.0, 1.0};
        curve.values = {0.0, 1.0};
        curve.cap = 1.0;
        CHECK_THROWS_AS(arrival_time(curve, 0.0), domain_error);
        CHECK_THROWS_AS(arrival_time(curve, 1.0), domain_error);
    }
}

TEST_CASE("all bound families are monotone on t >= 0", "[bounds]") {
    const auto sys = paper_chain(6, 0.5, 1.0);
    PathSumEvaluator ev({0}, {5}, sys, natural_time(3.0), 1e-8);
    const double phi = interaction_norm_xi(sys, 1.0);
    double prev_old = -1, prev_ps = -1, prev_1d = -1, prev_tilde = -1;
    for (double t : linspace(0.0, 3.0, 60)) {
        const double v_old = old_bound(t, 0, 5, sys, 1.0, true, phi);
        const double v_ps = ev.value(t, 0.5);
        const double v_1d = new_bound_1d(t, 5, 1.0, 0.5);
        const double v_tilde = tilde_bound(t, 2.0, 0.5);
        CHECK(v_old >= prev_old);
        CHECK(v_ps >= prev_ps);
        CHECK(v_1d >= prev_1d);
        CHECK(v_tilde >= prev_tilde);
        prev_old = v_old;
        prev_ps = v_ps;
        prev_1d = v_1d;
        prev_tilde = v_tilde;
    }
}
