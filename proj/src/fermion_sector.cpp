#include "sqmlab/fermion_sector.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace sqm {

namespace {

constexpr std::size_t max_modes = 12;

int bit(std::size_t s, std::size_t a, std::size_t L) { return static_cast<int>((s >> (L - 1 - a)) & 1u); }
std::size_t flip(std::size_t s, std::size_t a, std::size_t L) { return s ^ (std::size_t{1} << (L - 1 - a)); }

// occupied modes before a
int string_sign(std::size_t s, std::size_t a, std::size_t L)
{
    const std::size_t mask = a == 0 ? 0 : ((std::size_t{1} << a) - 1) << (L - a);
    return std::popcount(s & mask) % 2 ? -1 : 1;
}

// fswap on adjacent modes (a, a+1) applied to a basis state
std::pair<std::size_t, int> fswap_state(std::size_t s, std::size_t a, std::size_t L)
{
    const int x = bit(s, a, L), y = bit(s, a + 1, L);
    if (x == y) return {s, 1};
    const std::size_t t = flip(flip(s, a, L), a + 1, L);
    return {t, x == 1 ? 1 : -1};
}

} // namespace

Operator GammaSet::slash(const std::array<cplx, 4>& p) const
{
    Operator r = g[0] * p[0];
    for (int i = 1; i < 4; ++i) r -= g[i] * p[i];
    return r;
}

GammaSet gamma_set()
{
    GammaSet gs;
    const cplx I(0, 1);
    gs.g[0] = Operator(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1});
    // gamma^i = [[0, sigma_i], [-sigma_i, 0]]
    const std::array<std::array<cplx, 4>, 3> sig{{{0, 1, 1, 0}, {0, -I, I, 0}, {1, 0, 0, -1}}};
    for (int i = 0; i < 3; ++i) {
        Operator g(Dims{4});
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                g(r, 2 + c) = sig[i][2 * r + c];
                g(2 + r, c) = -sig[i][2 * r + c];
            }
        gs.g[i + 1] = g;
    }
    return gs;
}

double clifford_residual(const GammaSet& gs)
{
    double r = 0;
    const Operator I = Operator::identity(4);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            r = std::max(r, max_abs_diff(anticommutator(gs.g[mu], gs.g[nu]), I * cplx(2 * GammaSet::eta(mu, nu))));
    return r;
}

FermionLayout::FermionLayout(std::size_t N_, std::size_t M_) : N(N_), M(M_)
{
    if (N < 1 || M < 1) throw std::invalid_argument("FermionLayout: need N >= 1 and M >= 1");
    if (N * M > max_modes) throw std::length_error("FermionLayout: dense fermionic spaces are capped at 2^12 states");
}

Operator annihilation(const FermionLayout& l, std::size_t a)
{
    const std::size_t L = l.modes();
    if (a >= L) throw std::out_of_range("fermion mode out of range");
    Operator c(l.dims());
    for (std::size_t s = 0; s < l.dim(); ++s)
        if (bit(s, a, L)) c(flip(s, a, L), s) = static_cast<double>(string_sign(s, a, L));
    return c;
}

Operator creation(const FermionLayout& l, std::size_t a) { return annihilation(l, a).adjoint(); }

Operator parity(const FermionLayout& l)
{
    Operator P(l.dims());
    for (std::size_t s = 0; s < l.dim(); ++s) P(s, s) = std::popcount(s) % 2 ? -1.0 : 1.0;
    return P;
}

Operator number(const FermionLayout& l)
{
    Operator n(l.dims());
    for (std::size_t s = 0; s < l.dim(); ++s) n(s, s) = static_cast<double>(std::popcount(s));
    return n;
}

double anticommutator_residual(const FermionLayout& l)
{
    const std::size_t L = l.modes();
    std::vector<Operator> c, cd;
    for (std::size_t a = 0; a < L; ++a) c.push_back(annihilation(l, a)), cd.push_back(creation(l, a));
    const Operator I = Operator::identity(l.dims());
    const Operator Z(l.dims());
    double r = 0;
    for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = 0; b < L; ++b) {
            r = std::max(r, max_abs_diff(anticommutator(c[a], cd[b]), a == b ? I : Z));
            r = std::max(r, anticommutator(c[a], c[b]).max_abs());
        }
    return r;
}

Operator fswap() { return Operator(4, {1, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 1}); }

CycleImage cycle_image(const FermionLayout& l, std::size_t a)
{
    if (a >= l.modes()) throw std::out_of_range("fermion mode out of range");
    if (l.N == 1) return {a, 1};
    const std::size_t t = a / l.M, m = a % l.M;
    if (t + 1 < l.N) return {l.mode(t + 1, m), 1};
    return {l.mode(0, m), (l.modes() - 1) % 2 ? -1 : 1};
}

Operator fermionic_cycle(const FermionLayout& l)
{
    const std::size_t L = l.modes();
    Operator C(l.dims());
    if (l.N == 1) return Operator::identity(l.dims());
    // W = F_{0,1} F_{1,2} ... F_{L-2,L-1}: the rightmost factor acts first
    for (std::size_t s0 = 0; s0 < l.dim(); ++s0) {
        std::size_t s = s0;
        int sign = 1;
        for (std::size_t rep = 0; rep < l.M; ++rep)
            for (std::size_t j = L - 1; j-- > 0;) {
                const auto [t, sg] = fswap_state(s, j, L);
                s = t, sign *= sg;
            }
        C(s, s0) = static_cast<double>(sign);
    }
    return C;
}

double cycle_residual(const FermionLayout& l, const Operator& C)
{
    const Operator Cd = C.adjoint();
    double r = 0;
    for (std::size_t a = 0; a < l.modes(); ++a) {
        const CycleImage im = cycle_image(l, a);
        r = std::max(r, max_abs_diff(C * annihilation(l, a) * Cd, annihilation(l, im.mode) * cplx(im.sign)));
    }
    return r;
}

SectorSigns cycle_power_signs(const FermionLayout& l)
{
    const Operator CN = mpow(fermionic_cycle(l), l.N);
    const Operator P = parity(l);
    SectorSigns out{0.0, 0.0};
    bool seen_even = false, seen_odd = false;
    for (std::size_t i = 0; i < l.dim(); ++i) {
        const bool even = P(i, i).real() > 0;
        cplx& v = even ? out.even : out.odd;
        bool& seen = even ? seen_even : seen_odd;
        if (!seen) v = CN(i, i), seen = true;
        for (std::size_t j = 0; j < l.dim(); ++j) {
            const cplx want = i == j ? v : cplx(0);
            if (std::abs(CN(i, j) - want) > 1e-12) throw std::logic_error("cycle power is not a multiple of identity per sector");
        }
    }
    return out;
}

Operator fermion_quadratic(const FermionLayout& l, const Operator& h)
{
    const std::size_t L = l.modes();
    if (h.dim() != L) throw dimension_error("fermion_quadratic: h must be modes x modes");
    std::vector<Operator> c;
    for (std::size_t a = 0; a < L; ++a) c.push_back(annihilation(l, a));
    Operator S(l.dims());
    for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = 0; b < L; ++b)
            if (h(a, b) != cplx(0)) S += c[a].adjoint() * c[b] * h(a, b);
    return S;
}

Operator dirac_mode_matrix(const std::array<double, 4>& p, double m, double eps_i)
{
    const GammaSet gs = gamma_set();
    const cplx mt = std::sqrt(cplx(m * m, -eps_i));
    const Operator X = gs.slash({p[0], p[1], p[2], p[3]}) - Operator::identity(4) * mt;
    return gs.g[0] * X;
}

cplx parity_weighted_trace(const FermionLayout& l, const Operator& S, double tau,
                           const std::vector<FermionInsert>& inserts, bool with_parity)
{
    if (S.dim() != l.dim()) throw dimension_error("parity_weighted_trace: action has wrong dimension");
    Operator W = expm(S * cplx(0, tau));
    if (with_parity) W = parity(l) * W;
    const cplx Z = W.trace();
    if (std::abs(Z) < 1e-300) throw std::domain_error("parity_weighted_trace: vanishing normalization");
    Operator X = W;
    for (const auto& in : inserts) X = X * (in.dagger ? creation(l, in.mode) : annihilation(l, in.mode));
    return X.trace() / Z;
}

Operator fermion_pair_correlator(const Operator& A, bool with_parity)
{
    const Operator I = Operator::identity(A.dim());
    const Operator E = expm(A);
    return inv(with_parity ? I - E : I + E);
}

Operator dirac_mode_propagator(const std::array<double, 4>& p, double m, double tau, double eps_i)
{
    if (!(tau > 0)) throw std::invalid_argument("dirac_mode_propagator: need tau > 0");
    const Operator A = dirac_mode_matrix(p, m, eps_i) * cplx(0, tau);
    return fermion_pair_correlator(A, true) * gamma_set().g[0];
}

Operator dirac_propagator_limit(const std::array<double, 4>& p, double m, double eps_i)
{
    const GammaSet gs = gamma_set();
    const cplx mt = std::sqrt(cplx(m * m, -eps_i));
    const double p2 = p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3];
    const Operator num = gs.slash({p[0], p[1], p[2], p[3]}) + Operator::identity(4) * mt;
    return num * (cplx(0, 1) / (p2 - mt * mt));
}

} // namespace sqm
