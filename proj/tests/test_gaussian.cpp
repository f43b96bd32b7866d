#include "sqmlab/gaussian.hpp"

#include <doctest.h>

#include <numbers>

using namespace sqm;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("pair correlator")
{
    const GaussianWeight w{{std::log(2.0), cplx(1.0, 0.4)}};
    CHECK(std::abs(gaussian_pair_correlator(w, 0, 0) - 1.0) < 1e-15);
    CHECK(gaussian_pair_correlator(w, 0, 1) == cplx(0));
    CHECK(std::abs(truncated_fock_pair_correlator(std::log(2.0), 40) - 1.0) < 1e-10);
    CHECK_THROWS_AS(gaussian_pair_correlator(GaussianWeight{{0.0}}, 0, 0), std::domain_error);
    CHECK_THROWS_AS(gaussian_pair_correlator(GaussianWeight{{cplx(-0.1, 0)}}, 0, 0), std::domain_error);

    for (double re : {0.6, 0.8, 1.5, 3.0})
        for (double im : {-2.0, 0.0, 0.7, 3.1}) {
            const cplx l(re, im);
            CHECK(std::abs(gaussian_pair_correlator({{l}}, 0, 0) - truncated_fock_pair_correlator(l, 40)) < 1e-8);
        }

    // truncation tail: the difference is exactly x^{M+1} ((M+1) - M x - ... ) / ..., below the
    // closed-form bound (M+1) x^{M+1} / ((1-x)(1 - x^{M+1})) with x = e^{-lambda}
    for (double re : {0.5, 0.52, 0.55}) {
        const cplx l(re, 0.3);
        const unsigned M = 40;
        const double x = std::exp(-re);
        const double bound = (M + 1) * std::pow(x, M + 1) / ((1 - x) * (1 - std::pow(x, M + 1)));
        const double err = std::abs(gaussian_pair_correlator({{l}}, 0, 0) - truncated_fock_pair_correlator(l, M));
        CHECK(err <= bound);
        CHECK(err > 1e-3 * bound);
    }
}

TEST_CASE("tau mode correlator")
{
    // T = 2 pi: integer frequencies; single spatial mode with m = 2
    const ModeGrid g(2 * pi, 9, {}, {}, 2.0);
    const auto modes = g.modes();
    std::size_t on = 0, off = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i].n0 == 2) on = i;
        if (modes[i].n0 == 4) off = i;
    }
    const double ei = 0.3;
    CHECK(tau_mode_correlator(g, 0.01, ei, on, off) == cplx(0));
    const double tau = 1e-3;
    CHECK(std::abs(tau_mode_correlator(g, tau, ei, on, on) - 1.0 / std::expm1(tau * ei)) < 1e-6);

    const cplx lim = cplx(0, 1) / cplx(modes[off].delta, ei);
    double prev = 0;
    for (double t : {0.08, 0.04, 0.02, 0.01, 0.005}) {
        const double err = std::abs(t * tau_mode_correlator(g, t, ei, off, off) - lim);
        // leading error is -tau/2
        CHECK(std::abs(err / (t / 2) - 1) < 0.05);
        if (prev > 0) CHECK(std::abs(err / prev - 0.5) < 0.05);
        prev = err;
    }

    // conj(C(tau, eps_i)) = C(-tau, -eps_i): the exponent goes to its conjugate
    for (double t : {0.3, 0.05})
        for (std::size_t i : {on, off}) {
            const cplx c = tau_mode_correlator(g, t, ei, i, i);
            const cplx flipped = gaussian_pair_correlator({{action_exponent(modes[i].delta, -t, -ei)}}, 0, 0);
            CHECK(std::abs(std::conj(c) - flipped) < 1e-12 * std::abs(c));
        }
    CHECK_THROWS(tau_mode_correlator(g, -0.1, ei, on, on));
}

TEST_CASE("two-time contraction")
{
    // fine grid: tau = eps; long window so exp(-eps_i T) is negligible
    const double eps = 0.01, ei = 0.05, T = 400;
    const ModeGrid g(T, static_cast<std::size_t>(T / eps), {}, {}, 1.7);
    const double E = 1.7;
    for (long j : {-4L, -1L, 0L, 1L, 4L, 9L}) {
        const cplx sum = two_time_contraction(g, eps, ei, 100 + j, 100, {});
        CHECK(std::abs(sum - two_time_contraction_fine(g, ei, 100 + j, 100, {})) < 1e-9);
        const cplx oracle = j >= 0 ? std::exp(cplx(0, -E * eps * j)) : cplx(0);
        CHECK(std::abs(sum - oracle) < 0.02);
    }
}

TEST_CASE("Feynman propagator against exact diagonalization")
{
    const double eps = 0.01, ei = 0.05, T = 400;
    const std::size_t N = static_cast<std::size_t>(T / eps);

    // single mode: equal-point value is the ground-state variance 1/(2E)
    const double m = 1.3;
    const ModeGrid one(T, N, {1}, {1.0}, m);
    const cplx v = feynman_propagator_grid(one, eps, ei, {5, {0}}, {5, {0}});
    CHECK(std::abs(v - 1.0 / (2 * m)) < 0.02 / (2 * m));
    const FreeFieldOracle o1(one, 24);
    CHECK(std::abs(o1.time_ordered({5, {0}}, {5, {0}}) - 1.0 / (2 * m)) < 1e-10);

    // two sites, momenta {-pi, 0}
    const ModeGrid two(T, N, {2}, {2.0}, 1.0);
    const FreeFieldOracle o2(two, 20);
    for (long dt : {0L, 3L, -3L, 7L})
        for (std::size_t x : {0u, 1u}) {
            const SpacetimePoint a{10 + dt, {x}}, b{10, {0}};
            const cplx grid = feynman_propagator_grid(two, eps, ei, a, b);
            const cplx exact = o2.time_ordered(a, b);
            CHECK(std::abs(grid - exact) < 0.02 * std::abs(exact));
            // symmetric under exchange of the two points
            CHECK(std::abs(grid - feynman_propagator_grid(two, eps, ei, b, a)) < 1e-12);
        }
}
