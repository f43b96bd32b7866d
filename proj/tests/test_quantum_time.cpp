#include "helpers.hpp"
#include "sqmlab/quantum_time.hpp"
#include "sqmlab/random.hpp"

#include <doctest.h>

using namespace sqm;
using namespace sqmtest;

namespace {

// Schroedinger oracle: repeated application of an independently built U.
Ket evolve(const Operator& H, double eps, const Ket& psi, std::size_t steps)
{
    const Operator U = expm_oracle(cplx(0, -eps) * H);
    Ket out = psi;
    for (std::size_t i = 0; i < steps; ++i) out = U * out;
    return out;
}

} // namespace

TEST_CASE("history state examples")
{
    Rng rng(1);
    const Ket psi = rng.ket(3);
    ClockSystem cs{5, 0.3, Operator(Dims{3}), psi};
    const Ket h = history_state(cs);
    CHECK(h.is_normalized());
    for (std::size_t t = 0; t < 5; ++t)
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(h[t * 3 + i] - psi[i] / std::sqrt(5.0)) < 1e-15);

    ClockSystem one{1, 0.3, rng.hermitian(3), psi};
    CHECK(max_abs_diff(history_state(one), Ket(Dims{1, 3}, psi.entries())) < 1e-15);

    const double w = 1.3, eps = 0.2;
    const Ket psi2{cplx(0.6), cplx(0, 0.8)};
    ClockSystem two{4, eps, Operator::diag({0, w}), psi2};
    const Ket h2 = history_state(two);
    for (std::size_t t = 0; t < 4; ++t)
        CHECK(std::abs(h2[t * 2 + 1] - std::exp(cplx(0, -w * eps * t)) * psi2[1] / 2.0) < 1e-15);
}

TEST_CASE("conditioning reproduces Schroedinger expectations")
{
    Rng rng(2);
    ClockSystem cs{6, 0.4, rng.hermitian(3), rng.ket(3)};
    CHECK(std::abs(conditioned_expectation(cs, Operator::identity(3), 3) - 1.0) < 1e-12);
    const Operator O = rng.hermitian(3);
    CHECK(std::abs(conditioned_expectation(cs, O, 0) - expect(cs.psi0, O)) < 1e-12);
    for (std::size_t t = 0; t < 6; ++t) {
        const Ket pt = evolve(cs.H, cs.eps, cs.psi0, t);
        const cplx v = conditioned_expectation(cs, O, t);
        CHECK(std::abs(v - expect(pt, O)) < 1e-12);
        CHECK(std::abs(v.imag()) < 1e-12);
    }
    const Operator O2 = rng.ginibre(3);
    const cplx lin = conditioned_expectation(cs, O + O2 * cplx(2.0), 2);
    CHECK(std::abs(lin - conditioned_expectation(cs, O, 2) - 2.0 * conditioned_expectation(cs, O2, 2)) < 1e-12);
    CHECK_THROWS(conditioned_expectation(cs, O, 6));
}

TEST_CASE("geometric Heisenberg residual vanishes")
{
    Rng rng(3);
    ClockSystem cs{5, 0.25, rng.hermitian(3), rng.ket(3)};
    CHECK(std::abs(geometric_heisenberg_residual(cs, Operator::identity(3), 1)) < 1e-12);
    CHECK(std::abs(geometric_heisenberg_residual(cs, cs.H, 2)) < 1e-12);
    for (std::size_t t = 0; t + 1 < 5; ++t)
        CHECK(std::abs(geometric_heisenberg_residual(cs, rng.ginibre(3), t)) < 1e-12);
    CHECK_THROWS(geometric_heisenberg_residual(cs, cs.H, 4));
}

TEST_CASE("universe constraint")
{
    Rng rng(4);
    ClockSystem open{5, 0.3, rng.hermitian(2), rng.ket(2)};
    CHECK(universe_constraint_residual(open) < 1e-12);

    // U^N = I: eigenvalues of eps*H multiples of 2 pi / N
    const std::size_t N = 4;
    const double eps = 0.5;
    ClockSystem per{N, eps, Operator::diag({0, 2 * M_PI / (N * eps)}), rng.ket(2), true};
    CHECK(universe_constraint_residual(per) < 1e-12);
    ClockSystem off = per;
    off.H = Operator::diag({0, 1.0});
    CHECK(universe_constraint_residual(off) > 1e-3);
}
