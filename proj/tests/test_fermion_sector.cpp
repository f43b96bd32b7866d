#include "doctest.h"
#include "sqmlab/fermion_sector.hpp"
#include "sqmlab/random.hpp"

#include <cmath>

using namespace sqm;

namespace {
cplx inner_hs(const Operator& a, const Operator& b) { return (a.adjoint() * b).trace(); }
} // namespace

TEST_CASE("gamma matrices")
{
    const GammaSet gs = gamma_set();
    CHECK(clifford_residual(gs) < 1e-14);
    CHECK(anticommutator(gs.g[0], gs.g[1]).max_abs() < 1e-14);
    CHECK(max_abs_diff(gs.g[0] * gs.g[0], Operator::identity(4)) == 0.0);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            CHECK(std::abs((gs.g[mu] * gs.g[nu]).trace() - 4 * GammaSet::eta(mu, nu)) < 1e-14);
    CHECK(is_hermitian(gs.g[0]));
    for (int i = 1; i < 4; ++i) CHECK(max_abs_diff(gs.g[i].adjoint(), gs.g[i] * cplx(-1)) == 0.0);
    // (gamma p - m)(gamma p + m) = p^2 - m^2
    const std::array<cplx, 4> p{1.3, 0.2, -0.7, 0.4};
    const double m = 0.9, p2 = 1.69 - 0.04 - 0.49 - 0.16;
    const Operator I = Operator::identity(4);
    CHECK(max_abs_diff((gs.slash(p) - I * cplx(m)) * (gs.slash(p) + I * cplx(m)), I * cplx(p2 - m * m)) < 1e-14);
}

TEST_CASE("Jordan-Wigner modes")
{
    for (auto [N, M] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 2}, {4, 2}, {2, 4}}) {
        const FermionLayout l(N, M);
        CHECK(anticommutator_residual(l) == 0.0);
    }
    CHECK_THROWS_AS(FermionLayout(5, 3), std::length_error);
    CHECK_THROWS_AS(FermionLayout(0, 3), std::invalid_argument);

    const FermionLayout l(3, 1);
    const Operator P = parity(l), n = number(l);
    for (std::size_t a = 0; a < 3; ++a) {
        CHECK(anticommutator(P, annihilation(l, a)).max_abs() == 0.0);
        CHECK(max_abs_diff(commutator(n, creation(l, a)), creation(l, a)) == 0.0);
    }
}

TEST_CASE("fSWAP")
{
    const Operator F = fswap();
    CHECK(F(0, 0) == cplx(1));
    CHECK(F(1, 2) == cplx(1));
    CHECK(F(2, 1) == cplx(-1));
    CHECK(F(3, 3) == cplx(1));
    CHECK(F(1, 1) == cplx(0));
    CHECK(is_unitary(F));
    Operator d(Dims{4});
    d(0, 0) = 1, d(1, 1) = -1, d(2, 2) = -1, d(3, 3) = 1;
    CHECK(max_abs_diff(F * F, d) == 0.0);

    const FermionLayout l(2, 1);
    const Operator c0 = annihilation(l, 0), c1 = annihilation(l, 1);
    const Operator Fl = F.with_dims(l.dims());
    CHECK(max_abs_diff(Fl * c0 * Fl.adjoint(), c1) == 0.0);
    CHECK(max_abs_diff(Fl * c1 * Fl.adjoint(), c0 * cplx(-1)) == 0.0);
    CHECK(commutator(Fl, parity(l)).max_abs() == 0.0);

    // Gaussian: exp of the quadratic generator (pi/2)(c1^dag c0 - c0^dag c1)
    const Operator G = (c1.adjoint() * c0 - c0.adjoint() * c1) * cplx(std::acos(-1.0) / 2);
    CHECK(max_abs_diff(expm(G), Fl) < 1e-14);

    // a plain SWAP is not: the image of c0 leaves the linear span
    Operator S(l.dims());
    S(0, 0) = S(3, 3) = 1, S(1, 2) = S(2, 1) = 1;
    const Operator img = S * c0 * S.adjoint();
    Operator proj(l.dims());
    for (const Operator& b : {c0, c1, c0.adjoint(), c1.adjoint()}) proj += b * (inner_hs(b, img) / inner_hs(b, b));
    CHECK(max_abs_diff(proj, img) > 0.5);
}

TEST_CASE("fermionic cycle")
{
    CHECK(max_abs_diff(fermionic_cycle(FermionLayout(1, 1)), Operator::identity(2)) == 0.0);
    CHECK(max_abs_diff(fermionic_cycle(FermionLayout(1, 3)), Operator::identity(8)) == 0.0);
    CHECK(max_abs_diff(fermionic_cycle(FermionLayout(2, 1)), fswap()) == 0.0);

    for (auto [N, M] : {std::pair{2, 1}, {3, 1}, {4, 1}, {5, 1}, {2, 2}, {3, 2}, {2, 3}, {4, 2}}) {
        const FermionLayout l(N, M);
        const Operator C = fermionic_cycle(l);
        CHECK(is_unitary(C));
        CHECK(cycle_residual(l, C) < 1e-12);
        CHECK(commutator(C, parity(l)).max_abs() == 0.0);
        const int wrap = (l.modes() - 1) % 2 ? -1 : 1;
        CHECK(cycle_image(l, l.mode(N - 1, M - 1)).sign == wrap);
        CHECK(cycle_image(l, l.mode(0, 0)).mode == l.mode(1, 0));
        // C^N = P^{NM-1}
        const SectorSigns s = cycle_power_signs(l);
        CHECK(s.even == cplx(1));
        CHECK(s.odd == cplx(wrap));
    }
    const SectorSigns s3 = cycle_power_signs(FermionLayout(3, 1));
    CHECK(s3.even == cplx(1));
    CHECK(s3.odd == cplx(1));
    const SectorSigns s2 = cycle_power_signs(FermionLayout(2, 1));
    CHECK(s2.odd == cplx(-1));
}

TEST_CASE("parity-weighted Gaussian traces")
{
    // six modes: the four spinor components of one momentum plus two of another
    const FermionLayout l(1, 6);
    const Operator hp = dirac_mode_matrix({0.9, 0.3, -0.2, 0.5}, 1.1, 0.2);
    const Operator hq = dirac_mode_matrix({-0.4, 0.1, 0.6, 0.0}, 1.1, 0.2);
    Operator h(Dims{6});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) h(i, j) = hp(i, j);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) h(4 + i, 4 + j) = hq(i, j);
    const Operator S = fermion_quadratic(l, h);
    for (double tau : {0.3, 1.7}) {
        for (bool par : {true, false}) {
            CHECK(std::abs(parity_weighted_trace(l, S, tau, {}, par) - 1.0) < 1e-12);
            CHECK(std::abs(parity_weighted_trace(l, S, tau, {{2, false}}, par)) < 1e-12);
            CHECK(std::abs(parity_weighted_trace(l, S, tau, {{4, true}}, par)) < 1e-12);
            const Operator G = fermion_pair_correlator(h * cplx(0, tau), par);
            double err = 0;
            for (std::size_t a = 0; a < 6; ++a)
                for (std::size_t b = 0; b < 6; ++b)
                    err = std::max(err, std::abs(parity_weighted_trace(l, S, tau, {{a, false}, {b, true}}, par) - G(a, b)));
            CHECK(err < 1e-10);
        }
    }

    // single mode, real weight e^{-lambda n}: 1/(e^lambda + 1) without P, 1/(1 - e^lambda) with P
    const FermionLayout one(1, 1);
    for (double lam : {0.3, 1.0, 2.5}) {
        const Operator S1 = number(one) * cplx(0, lam); // e^{i tau S} = e^{-lambda n} at tau = 1
        const cplx plain = parity_weighted_trace(one, S1, 1.0, {{0, true}, {0, false}}, false);
        const cplx with = parity_weighted_trace(one, S1, 1.0, {{0, true}, {0, false}}, true);
        CHECK(std::abs(plain - 1.0 / (std::exp(lam) + 1)) < 1e-12);
        CHECK(std::abs(with - 1.0 / (1 - std::exp(lam))) < 1e-12);
    }

    // fermionic Wick: four-point value from pair correlators with the exchange sign
    const double tau = 0.8;
    const Operator G = fermion_pair_correlator(h * cplx(0, tau), true);
    const cplx four = parity_weighted_trace(l, S, tau, {{0, false}, {1, false}, {1, true}, {0, true}});
    CHECK(std::abs(four - (G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0))) < 1e-10);
}

TEST_CASE("Dirac mode propagator")
{
    const GammaSet gs = gamma_set();
    const double m = 1.2, ei = 0.05;
    // rest frame p = 0: limit is i m / (-m^2 + i eps_i) on the diagonal, entrywise
    const Operator lim0 = dirac_propagator_limit({0, 0, 0, 0}, m, ei);
    const cplx mt = std::sqrt(cplx(m * m, -ei));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(lim0(i, i) - cplx(0, 1) * mt / (-mt * mt)) < 1e-14);

    for (const std::array<double, 4> p :
         {std::array<double, 4>{0, 0, 0, 0}, {2.0, 0.3, -0.4, 0.2}, {0.5, 0.1, 0.0, -0.3}}) {
        const Operator lim = dirac_propagator_limit(p, m, ei);
        // (gamma p - m) * lim = i
        const Operator X = gs.slash({p[0], p[1], p[2], p[3]}) - Operator::identity(4) * mt;
        CHECK(max_abs_diff(X * lim, Operator::identity(4) * cplx(0, 1)) < 1e-12);

        double prev = 0;
        for (double tau : {0.02, 0.01, 0.005, 0.0025}) {
            const double err = max_abs_diff(dirac_mode_propagator(p, m, tau, ei) * cplx(tau), lim);
            if (prev > 0) CHECK(std::abs(err / prev - 0.5) < 0.05);
            prev = err;
        }
    }
    CHECK_THROWS(dirac_mode_propagator({0, 0, 0, 0}, m, -0.1, ei));
}
