#include "doctest.h"
#include "sqmlab/gaussian.hpp"
#include "sqmlab/random.hpp"
#include "sqmlab/wick_perturb.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace sqm;

namespace {
constexpr double pi = std::numbers::pi;

ContractionKernel random_kernel(std::size_t n, Rng& rng)
{
    ContractionKernel k(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) k.set(i, j, rng.gaussian_complex());
    return k;
}

InsertionList externals(std::size_t n)
{
    InsertionList l;
    for (std::size_t i = 0; i < n; ++i) l.push_back({FieldKind::field, static_cast<int>(100 + i)});
    return l;
}
} // namespace

TEST_CASE("pairing enumeration")
{
    CHECK(enumerate_pairings(0).size() == 1);
    CHECK(enumerate_pairings(2).size() == 1);
    CHECK(enumerate_pairings(4).size() == 3);
    CHECK(enumerate_pairings(8).size() == 105);
    for (std::size_t n = 1; n <= 5; ++n) CHECK(enumerate_pairings(2 * n).size() == double_factorial(2 * n - 1));
    CHECK_THROWS_AS(enumerate_pairings(5), std::invalid_argument);

    const auto p6 = enumerate_pairings(6);
    std::set<Pairing> uniq(p6.begin(), p6.end());
    CHECK(uniq.size() == p6.size());
    for (const auto& p : p6) {
        std::vector<int> seen(6, 0);
        for (const auto& [i, j] : p) {
            CHECK(i < j);
            ++seen[i], ++seen[j];
        }
        for (int s : seen) CHECK(s == 1);
    }
    CHECK(p6 == enumerate_pairings(6));
    CHECK(p6.front() == Pairing{{0, 1}, {2, 3}, {4, 5}});
}

TEST_CASE("wick evaluation")
{
    ContractionKernel k2(2);
    k2.set(0, 1, cplx(0.3, -2));
    CHECK(wick_evaluate(externals(2), k2) == cplx(0.3, -2));

    const cplx g(1.7, 0.4);
    ContractionKernel k4(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) k4.set(i, j, g);
    CHECK(std::abs(wick_evaluate(externals(4), k4) - 3.0 * g * g) < 1e-14);

    ContractionKernel missing(4);
    missing.set(0, 1, 1.0);
    CHECK_THROWS_AS(wick_evaluate(externals(4), missing), std::out_of_range);
    CHECK_THROWS(k4.set(2, 1, 1.0));

    // recursive evaluation equals the explicit pairing sum
    Rng rng(3);
    for (std::size_t n : {2u, 4u, 6u, 8u, 10u}) {
        const auto k = random_kernel(n, rng);
        const cplx a = wick_evaluate(externals(n), k);
        CHECK(std::abs(a - wick_sum(enumerate_pairings(n), k)) < 1e-12 * std::max(1.0, std::abs(a)));
    }

    // multilinear: scaling every entry touching insertion 2 scales the result
    const auto k = random_kernel(6, rng);
    auto ks = k;
    const cplx c(0.2, 1.1);
    for (std::size_t j = 0; j < 6; ++j)
        if (j != 2) {
            const std::size_t a = std::min<std::size_t>(j, 2), b = std::max<std::size_t>(j, 2);
            ks.set(a, b, c * k(a, b));
        }
    CHECK(std::abs(wick_evaluate(externals(6), ks) - c * wick_evaluate(externals(6), k)) < 1e-12);

    // relabeling that carries the kernel table along leaves the sum unchanged
    const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
    ContractionKernel kp(6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
            const std::size_t a = perm[i], b = perm[j];
            kp.set(i, j, k(std::min(a, b), std::max(a, b)));
        }
    CHECK(std::abs(wick_evaluate(externals(6), kp) - wick_evaluate(externals(6), k)) < 1e-12);
}

TEST_CASE("four-point Gaussian correlator against a dense trace")
{
    // truncation at nmax = 8 costs about (n+1)(n+2) e^{-7 Re l} for two raising operators
    const cplx l(4.0, 0.6);
    const unsigned nmax = 8;
    const std::size_t d = nmax + 1;
    Operator a(Dims{d});
    for (std::size_t n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Operator ad = a.adjoint();
    Operator rho(Dims{d});
    for (std::size_t n = 0; n < d; ++n) rho(n, n) = std::exp(-l * static_cast<double>(n));
    const cplx Z = rho.trace();

    const cplx n_ = gaussian_pair_correlator({{l}}, 0, 0);
    auto contraction = [&](FieldKind x, FieldKind y) -> cplx {
        if (x == y) return 0.0;
        return x == FieldKind::create ? n_ : n_ + 1.0;
    };
    const std::vector<std::vector<FieldKind>> strings{
        {FieldKind::annihilate, FieldKind::create, FieldKind::annihilate, FieldKind::create},
        {FieldKind::annihilate, FieldKind::annihilate, FieldKind::create, FieldKind::create},
        {FieldKind::create, FieldKind::annihilate, FieldKind::create, FieldKind::annihilate},
        {FieldKind::create, FieldKind::create, FieldKind::annihilate, FieldKind::annihilate},
        {FieldKind::annihilate, FieldKind::create, FieldKind::create, FieldKind::annihilate}};
    for (const auto& s : strings) {
        InsertionList ins;
        Operator prod = Operator::identity(Dims{d});
        for (std::size_t i = 0; i < 4; ++i) {
            ins.push_back({s[i], static_cast<int>(i)});
            prod = prod * (s[i] == FieldKind::create ? ad : a);
        }
        ContractionKernel k(4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j) k.set(i, j, contraction(s[i], s[j]));
        const cplx dense = (rho * prod).trace() / Z;
        CHECK(std::abs(wick_evaluate(ins, k) - dense) < 1e-8);
    }
}

TEST_CASE("connected filter")
{
    // order 0: identity
    const auto p4 = enumerate_pairings(4);
    CHECK(connected_filter(p4, externals(4)).size() == 3);

    // first order: four externals and one phi^4 vertex
    InsertionList ins;
    for (int i = 0; i < 4; ++i) ins.push_back({FieldKind::field, 0});
    for (int i = 0; i < 4; ++i) ins.push_back({FieldKind::field, 1 + i});
    const auto p8 = enumerate_pairings(8);
    const auto conn = connected_filter(p8, ins);
    CHECK(conn.size() == 24);
    for (const auto& p : conn)
        for (const auto& [i, j] : p) CHECK((i < 4) != (j < 4));
    // only the fully self-contracted vertex is a bubble
    const auto nvb = connected_filter(p8, ins, Connectivity::no_vacuum_bubbles);
    std::size_t bubbles = 0;
    for (const auto& p : p8) {
        std::size_t vv = 0;
        for (const auto& [i, j] : p) vv += (i < 4 && j < 4);
        bubbles += vv == 2;
    }
    CHECK(nvb.size() == p8.size() - bubbles);
    CHECK(bubbles == 3 * 3);

    // one-loop s-channel pairing: p1 p2 at z, k1 k2 at w, two z-w lines
    InsertionList two;
    for (int i = 0; i < 4; ++i) two.push_back({FieldKind::field, 0});
    for (int i = 0; i < 4; ++i) two.push_back({FieldKind::field, 1});
    for (int i = 0; i < 4; ++i) two.push_back({FieldKind::field, 2 + i});
    const Pairing loop{{0, 8}, {1, 9}, {2, 4}, {3, 5}, {6, 10}, {7, 11}};
    CHECK(connected_filter({loop}, two).size() == 1);
    const Pairing split{{0, 8}, {1, 9}, {2, 3}, {4, 5}, {6, 10}, {7, 11}};
    CHECK(connected_filter({split}, two).empty());
}

TEST_CASE("vacuum bubbles cancel in the ratio")
{
    // Two external fields and phi^4 vertices on a 2-point "spacetime", Gaussian kernel
    // built from a random symmetric 2-point function G plus the two externals.
    const std::size_t P = 2;
    std::vector<cplx> G(4);
    G[0] = cplx(0.8, 0.1), G[3] = cplx(0.6, -0.2), G[1] = G[2] = cplx(0.3, 0.05);
    const std::vector<cplx> ext0{cplx(0.5, 0.2), cplx(-0.1, 0.4)}, ext1{cplx(0.3, -0.3), cplx(0.2, 0.1)};
    const cplx gx(0.7, -0.1); // <X0 X1>
    const cplx g(0.09, -0.04);

    // insertions: externals X0, X1 first, then the fields of each vertex
    auto build = [&](const std::vector<std::size_t>& verts, bool with_ext) {
        InsertionList ins;
        std::vector<int> where; // -1, -2 externals; otherwise spacetime point
        if (with_ext) {
            ins.push_back({FieldKind::field, 100}), where.push_back(-1);
            ins.push_back({FieldKind::field, 101}), where.push_back(-2);
        }
        for (std::size_t v = 0; v < verts.size(); ++v)
            for (int f = 0; f < 4; ++f) ins.push_back({FieldKind::field, static_cast<int>(v)}), where.push_back(verts[v]);
        ContractionKernel k(ins.size());
        for (std::size_t i = 0; i < ins.size(); ++i)
            for (std::size_t j = i + 1; j < ins.size(); ++j) {
                const int a = where[i], b = where[j];
                cplx v;
                if (a < 0 && b < 0) v = gx;
                else if (a < 0) v = (a == -1 ? ext0 : ext1)[b];
                else v = G[a * P + b];
                k.set(i, j, v);
            }
        return std::make_pair(ins, k);
    };
    // coefficients of g^k, with 1/k! and the vertex positions summed
    auto series = [&](bool with_ext, bool connected_only) {
        std::vector<cplx> c(3, 0.0);
        for (int order = 0; order <= 2; ++order) {
            std::vector<std::vector<std::size_t>> sets{{}};
            for (int o = 0; o < order; ++o) {
                std::vector<std::vector<std::size_t>> next;
                for (const auto& s : sets)
                    for (std::size_t z = 0; z < P; ++z) {
                        auto t = s;
                        t.push_back(z);
                        next.push_back(t);
                    }
                sets = next;
            }
            for (const auto& s : sets) {
                const auto [ins, k] = build(s, with_ext);
                if (connected_only)
                    c[order] += wick_sum(connected_filter(enumerate_pairings(ins.size()), ins,
                                                          Connectivity::no_vacuum_bubbles), k);
                else c[order] += wick_evaluate(ins, k);
            }
            c[order] *= order == 2 ? 0.5 : 1.0;
        }
        return c;
    };
    const auto N = series(true, false), D = series(false, false), C = series(true, true);
    // (N0 + g N1 + g^2 N2) / (1 + g D1 + g^2 D2) through g^2
    CHECK(std::abs(D[0] - 1.0) < 1e-15);
    const cplx r1 = N[1] - N[0] * D[1];
    const cplx r2 = N[2] - N[1] * D[1] - N[0] * D[2] + N[0] * D[1] * D[1];
    CHECK(std::abs(N[0] - C[0]) < 1e-10);
    CHECK(std::abs(r1 - C[1]) < 1e-10);
    CHECK(std::abs(r2 - C[2]) < 1e-10);
    CHECK(std::abs((N[0] + g * r1 + g * g * r2) - (C[0] + g * C[1] + g * g * C[2])) < 1e-10);
    // bubbles are really there: the plain numerator differs
    CHECK(std::abs(N[1] - C[1]) > 1e-3);
}

TEST_CASE("first-order 2 -> 2 amplitude")
{
    // 3x3 spatial grid, L = 2 pi, m = 1: |k| = 1 modes have E = sqrt 2; T puts them at n0 = 1
    const double m = 1.0, E = std::sqrt(2.0);
    const ModeGrid g(2 * pi / E, 8, {3, 3}, {2 * pi, 2 * pi}, m);
    const double lam = 0.7;
    const ExternalMode p1{1, {1, 0}}, p2{1, {-1, 0}}, k1{1, {0, 1}}, k2{1, {0, -1}};
    const cplx target = cplx(0, -lam) * lattice_volume(g);

    const auto sweep = phi4_first_order_sweep(g, lam, p1, p2, k1, k2, {0.1, 0.02, 4});
    CHECK(std::abs(sweep.extrapolated - target) < 0.01 * std::abs(target));
    CHECK(std::abs(sweep.extrapolated - target) < 1e-9 * std::abs(target));
    // tau-independent at leading order: the pole prefactors cancel each propagator's 1/tau
    const double slope = std::abs(sweep.value[0] - sweep.value[1]) / (sweep.tau[0] - sweep.tau[1]);
    CHECK(slope / std::abs(target) < 1e-2);

    // momentum violation: exactly zero
    const ExternalMode k2v{1, {1, 1}};
    CHECK(phi4_first_order_2to2_at(g, lam, p1, p2, k1, k2v, 0.01, 0.1) == cplx(0));
    const ExternalMode k1f{2, {0, 1}};
    CHECK(phi4_first_order_2to2_at(g, lam, p1, p2, k1f, k2, 0.01, 0.1) == cplx(0));
    CHECK(vertex_sum(g, 0, {3, -3}) == lattice_volume(g));
    CHECK(vertex_sum(g, 1, {0, 0}) == 0.0);

    CHECK_THROWS_AS(phi4_first_order_2to2(g, lam, p1, p1, k1, k2), std::invalid_argument);

    // off-shell conserving modes on a 4-site chain reach the same limit
    const ModeGrid chain(3.0, 6, {4}, {4.0}, 0.8);
    const ExternalMode a{1, {1}}, b{1, {-2}}, c{2, {0}}, d{0, {-1}};
    const cplx tc = cplx(0, -lam) * lattice_volume(chain);
    CHECK(std::abs(phi4_first_order_2to2(chain, lam, a, b, c, d) - tc) < 0.01 * std::abs(tc));

    // S-matrix interface and the Dyson oracle
    const std::vector<std::vector<int>> in{{1, 0}, {-1, 0}}, out{{0, 1}, {0, -1}};
    const cplx s1 = smatrix_element(g, in, out, lam, 1);
    CHECK(std::abs(s1 - sweep.extrapolated) < 1e-12 * std::abs(target));
    const cplx oracle = first_order_dyson_oracle(g, lam, in, out);
    CHECK(std::abs(s1 - oracle) < 0.02 * std::abs(oracle));
    CHECK(smatrix_element(g, in, out, 0.0, 1) == cplx(0));
    CHECK_THROWS_AS(smatrix_element(g, in, out, lam, 3), std::invalid_argument);
    CHECK_THROWS(smatrix_element(g, {{1, 1}, {-1, 0}}, out, lam, 1)); // E = sqrt 3 is off the frequency grid
}

TEST_CASE("second-order s-channel bubble")
{
    const double m = 1.0, E = std::sqrt(2.0);
    const std::size_t Nt = 512;
    const ModeGrid g(6 * 2 * pi / E, Nt, {3, 3}, {2 * pi, 2 * pi}, m);
    const double lam = 0.5, ei = 0.3;
    const std::vector<std::vector<int>> in{{1, 0}, {-1, 0}}, out{{0, 1}, {0, -1}};
    ScatteringOptions opt;
    opt.eps_i = ei;
    const cplx grid = smatrix_element(g, in, out, lam, 2, opt);
    const cplx oracle = s_channel_dyson_oracle(g, lam, in, out, ei);
    CHECK(std::abs(grid - oracle) < 0.05 * std::abs(oracle));
    // scales as lambda^2
    CHECK(std::abs(smatrix_element(g, in, out, 2 * lam, 2, opt) - 4.0 * grid) < 1e-10 * std::abs(grid));
    CHECK(smatrix_element(g, in, out, 0.0, 2, opt) == cplx(0));
}
