#include "sqmlab/random.hpp"
#include "sqmlab/scm_constraints.hpp"

#include <doctest.h>

#include <numbers>

using namespace sqm;

namespace {

constexpr double pi = std::numbers::pi;

// T = 2 pi, frequencies are integers -5..5; one spatial dimension with two
// sites on L = pi/2 gives momenta {-4, 0}; m = 3 -> energies {5, 3}, both on-shell.
ModeGrid massive_grid() { return ModeGrid(2 * pi, 11, {2}, {pi / 2}, 3.0); }

std::size_t find_mode(const ConstraintSet& cs, int n0, int n1)
{
    for (std::size_t i = 0; i < cs.modes.size(); ++i)
        if (cs.modes[i].n0 == n0 && cs.modes[i].n[0] == n1) return i;
    throw std::runtime_error("mode not on grid");
}

LinearObservable random_obs(Rng& rng, std::size_t K)
{
    LinearObservable o(K);
    for (std::size_t i = 0; i < K; ++i) o.alpha[i] = rng.gaussian_complex(), o.beta[i] = rng.gaussian_complex();
    return o;
}

} // namespace

TEST_CASE("poisson bracket")
{
    const std::size_t K = 3;
    const auto a0 = LinearObservable::a(K, 0), a1 = LinearObservable::a(K, 1), s0 = LinearObservable::a_star(K, 0);
    CHECK(poisson_bracket(a0, s0) == cplx(0, -1));
    CHECK(poisson_bracket(s0, a0) == cplx(0, 1));
    CHECK(poisson_bracket(a0, a0) == cplx(0));
    CHECK(poisson_bracket(a0 * 2.0 + a1, s0) == cplx(0, -2));
}

TEST_CASE("constraint matrix blocks")
{
    const ModeGrid g = massive_grid();
    const ConstraintSet cs = build_constraints(g);
    CHECK(cs.modes.size() == 22);
    const std::size_t on = find_mode(cs, 5, -1);
    CHECK(std::abs(cs.modes[on].delta) < 1e-14);
    CHECK(cs.C(2 * on, 2 * on + 1) == cplx(0));

    // Delta = 2: n0 = 5 with E = 3
    const std::size_t two = find_mode(cs, 5, 0);
    CHECK(std::abs(cs.modes[two].delta - 2.0) < 1e-14);
    CHECK(std::abs(cs.C(2 * two, 2 * two + 1) - cplx(0, -4)) < 1e-13);
    CHECK(std::abs(cs.C(2 * two + 1, 2 * two) - cplx(0, 4)) < 1e-13);
    CHECK(cs.C(2 * two, 2 * two) == cplx(0));

    // antisymmetry with conjugation convention: C_BA = -C_AB
    for (std::size_t A = 0; A < cs.C.dim(); ++A)
        for (std::size_t B = 0; B < cs.C.dim(); ++B) CHECK(std::abs(cs.C(A, B) + cs.C(B, A)) < 1e-12);

    const ModeGrid single(2 * pi, 1, {}, {}, 1.0);
    const ConstraintSet c1 = build_constraints(single);
    CHECK(singular_values(c1.C).back() > 0.5); // rank 2
}

TEST_CASE("classification")
{
    const ConstraintSet cs = build_constraints(massive_grid());
    const auto cl = classify(cs);
    std::size_t zero = 0;
    for (const auto& m : cl) {
        if (std::abs(m.delta) <= 1e-12) {
            CHECK(m.kind == ConstraintClass::identically_zero);
            ++zero;
        } else {
            CHECK(m.kind == ConstraintClass::second_class);
        }
    }
    CHECK(zero == 2);

    ConstraintSet tiny = cs;
    tiny.modes[0].delta = 1e-13;
    CHECK(classify(tiny)[0].kind == ConstraintClass::identically_zero);
    CHECK(!classify(tiny)[0].note.empty());

    for (double c : {0.01, 0.5, 7.0, 300.0}) {
        ConstraintSet scaled = cs;
        for (auto& m : scaled.modes) m.delta *= c;
        const auto cl2 = classify(scaled);
        for (std::size_t i = 0; i < cl.size(); ++i) CHECK(cl2[i].kind == cl[i].kind);
    }
}

TEST_CASE("dirac brackets")
{
    const ConstraintSet cs = build_constraints(massive_grid());
    const std::size_t K = cs.modes.size();
    const std::size_t on = find_mode(cs, 3, 0), off = find_mode(cs, 2, 0);
    const auto a_on = LinearObservable::a(K, on), s_on = LinearObservable::a_star(K, on);
    const auto a_off = LinearObservable::a(K, off), s_off = LinearObservable::a_star(K, off);
    CHECK(std::abs(dirac_bracket(a_off, s_off, cs)) < 1e-12);
    CHECK(dirac_bracket(a_on, s_on, cs) == cplx(0, -1));
    CHECK(std::abs(dirac_bracket(a_on + a_off, s_on + s_off, cs) - cplx(0, -1)) < 1e-12);
    for (std::size_t i = 0; i < K; ++i) {
        const cplx db = dirac_bracket(LinearObservable::a(K, i), LinearObservable::a_star(K, i), cs);
        if (std::abs(cs.modes[i].delta) > 1e-12) CHECK(std::abs(db) < 1e-12);
        else CHECK(db == cplx(0, -1));
    }

    Rng rng(3);
    for (int c = 0; c < 10; ++c) {
        const auto f = random_obs(rng, K);
        for (std::size_t A = 0; A < cs.phi.size(); ++A)
            if (std::abs(cs.modes[A / 2].delta) > 1e-12) CHECK(std::abs(dirac_bracket(f, cs.phi[A], cs)) < 1e-12);
        const auto g = random_obs(rng, K);
        CHECK(std::abs(dirac_bracket(f, g, empty_constraints()) - poisson_bracket(f, g)) < 1e-15);
    }
}

TEST_CASE("equal-time bracket reconstruction")
{
    const ModeGrid g = massive_grid();
    CHECK(std::abs(equal_time_bracket_reconstruction(g, {0}, {0}, 0.3, 0.3) - 1.0) < 1e-14);
    CHECK(std::abs(equal_time_bracket_reconstruction(g, {0}, {1}, 0.3, 0.3)) < 1e-14);
    CHECK(std::abs(equal_time_bracket_reconstruction(g, {1}, {1}, -1.1, -1.1) - 1.0) < 1e-14);
    for (double dt : {0.2, 0.7, 1.9})
        for (std::size_t x : {0u, 1u}) {
            const cplx v = equal_time_bracket_reconstruction(g, {x}, {0}, dt, 0.0);
            CHECK(std::abs(v - field_bracket_mode_sum(g, {x}, {0}, dt, 0.0)) < 1e-13);
        }
    CHECK(std::abs(equal_time_bracket_reconstruction(g, {0}, {0}, 0.7, 0.0) - 1.0) > 1e-2);

    // 2D: 2x2 sites on a pi/2 box, momenta in {-4,0}^2, m = 3 -> E in {3, 5, sqrt(41)}
    // sqrt(41) is not on an integer grid, so the expansion is rejected
    const ModeGrid g2(2 * pi, 11, {2, 2}, {pi / 2, pi / 2}, 3.0);
    CHECK_THROWS_AS(equal_time_bracket_reconstruction(g2, {0, 0}, {0, 0}, 0, 0), std::invalid_argument);
    // massless zero mode has no normalizable amplitude
    const ModeGrid g0(2 * pi, 11, {2}, {pi / 2}, 0.0);
    CHECK_THROWS_AS(equal_time_bracket_reconstruction(g0, {0}, {0}, 0, 0), std::domain_error);
}

TEST_CASE("fourier derivative")
{
    for (std::size_t N : {7u, 8u}) {
        const double eps = 0.3;
        const auto D = fourier_derivative(N, eps);
        for (std::size_t t = 0; t < N; ++t)
            for (std::size_t s = 0; s < N; ++s) CHECK(std::abs(D[t * N + s] + D[s * N + t]) < 1e-14);
        const double w = 2 * pi * 2 / (N * eps);
        for (std::size_t t = 0; t < N; ++t) {
            double d = 0;
            for (std::size_t s = 0; s < N; ++s) d += D[t * N + s] * std::sin(w * eps * s);
            CHECK(std::abs(d - w * std::cos(w * eps * t)) < 1e-12);
        }
    }
}

TEST_CASE("Hamilton constraints")
{
    const std::size_t N = 12;
    const double eps = 0.25, m = 1.3, T = N * eps;
    const ParticleAction free{N, eps, m, {}};
    CHECK(hamilton_constraint_residual(free, {std::vector<double>(N, 0.8), std::vector<double>(N, 0.0)}).max_abs < 1e-12);

    const double W = 2 * pi * 2 / T, A = 0.6;
    const ParticleAction osc{N, eps, m, {0.0, 0.0, 0.5 * m * W * W}};
    Trajectory tr{std::vector<double>(N), std::vector<double>(N)};
    for (std::size_t t = 0; t < N; ++t) {
        tr.q[t] = A * std::cos(W * eps * t + 0.3);
        tr.p[t] = -m * A * W * std::sin(W * eps * t + 0.3);
    }
    CHECK(hamilton_constraint_residual(osc, tr).max_abs < 1e-10);

    // residuals equal the action gradient: {q_t,S} = dS/dp_t, {p_t,S} = -dS/dq_t
    Rng rng(8);
    Trajectory rnd{std::vector<double>(N), std::vector<double>(N)};
    for (std::size_t t = 0; t < N; ++t) rnd.q[t] = rng.normal(), rnd.p[t] = rng.normal();
    const ParticleAction quart{N, eps, m, {0.0, 0.1, 0.5, 0.0, 0.2}};
    const auto r = hamilton_constraint_residual(quart, rnd);
    CHECK(r.max_abs > 1e-1);
    const double h = 1e-6;
    for (std::size_t t = 0; t < N; ++t) {
        Trajectory up = rnd, dn = rnd;
        up.p[t] += h, dn.p[t] -= h;
        const double dSdp = (action_value(quart, up) - action_value(quart, dn)) / (2 * h);
        CHECK(std::abs(dSdp / eps - r.q_eq[t]) < 1e-6);
        up = rnd, dn = rnd;
        up.q[t] += h, dn.q[t] -= h;
        const double dSdq = (action_value(quart, up) - action_value(quart, dn)) / (2 * h);
        CHECK(std::abs(-dSdq / eps - r.p_eq[t]) < 1e-6);
    }
}
