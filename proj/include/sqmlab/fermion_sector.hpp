#pragma once

#include "sqmlab/operator.hpp"

#include <array>
#include <vector>

namespace sqm {

// Dirac representation, metric (+,-,-,-).
struct GammaSet {
    std::array<Operator, 4> g;
    static double eta(int mu, int nu) { return mu != nu ? 0.0 : (mu == 0 ? 1.0 : -1.0); }
    // gamma^mu p_mu = g0 p0 - g1 p1 - g2 p2 - g3 p3 for p = (p0, p1, p2, p3) upper components
    Operator slash(const std::array<cplx, 4>& p) const;
};

GammaSet gamma_set();
double clifford_residual(const GammaSet& gs); // max |{g^mu, g^nu} - 2 eta^{mu nu} I|

// N slices x M modes on 2^{NM} states.
//
// Sign conventions, all in one place:
//  - mode a = t * M + m (slice-major); mode 0 is the slowest tensor leg;
//  - |1> on a leg is occupied, c_a = Z x ... x Z x |0><1| x I x ...;
//  - fswap() is the printed 4x4 matrix on adjacent modes (a, a+1): |10> -> |01>, |01> -> -|10>,
//    so that F c_a F^dag = c_{a+1} and F c_{a+1} F^dag = -c_a;
//  - fermionic_cycle = W^M with W = F_{0,1} F_{1,2} ... F_{L-2,L-1}; conjugation sends
//    c_{t,m} -> c_{t+1,m} for t < N-1 and c_{N-1,m} -> (-1)^{NM-1} c_{0,m};
//  - N = 1 has no slice to move to and the cycle is the identity.
struct FermionLayout {
    std::size_t N = 1;
    std::size_t M = 1;

    FermionLayout(std::size_t N_, std::size_t M_);
    std::size_t modes() const { return N * M; }
    std::size_t dim() const { return std::size_t{1} << modes(); }
    std::size_t mode(std::size_t t, std::size_t m) const { return t * M + m; }
    Dims dims() const { return Dims(modes(), 2); }
};

Operator annihilation(const FermionLayout& l, std::size_t a);
Operator creation(const FermionLayout& l, std::size_t a);
Operator parity(const FermionLayout& l);         // (-1)^{N_f}
Operator number(const FermionLayout& l);         // N_f
double anticommutator_residual(const FermionLayout& l);

Operator fswap();

struct CycleImage {
    std::size_t mode;
    int sign;
};
// where conjugation by the cycle sends c_a
CycleImage cycle_image(const FermionLayout& l, std::size_t a);
Operator fermionic_cycle(const FermionLayout& l);
// max over a of |C c_a C^dag - sign c_image|
double cycle_residual(const FermionLayout& l, const Operator& C);

// Value of C^N on the even and odd parity sectors; throws when C^N is not a
// multiple of the identity on each sector.
struct SectorSigns {
    cplx even;
    cplx odd;
};
SectorSigns cycle_power_signs(const FermionLayout& l);

// sum_ab c_a^dag h_ab c_b
Operator fermion_quadratic(const FermionLayout& l, const Operator& h);

// gamma^0 (gamma^mu p_mu - m) with m^2 -> m^2 - i eps_i
Operator dirac_mode_matrix(const std::array<double, 4>& p, double m, double eps_i);

struct FermionInsert {
    std::size_t mode;
    bool dagger;
};

// Tr[P e^{i tau S} X_1 ... X_k] / Tr[P e^{i tau S}] on the dense space; with
// with_parity = false the P is dropped.
cplx parity_weighted_trace(const FermionLayout& l, const Operator& S, double tau,
                           const std::vector<FermionInsert>& inserts, bool with_parity = true);

// Gaussian closed form G_ab = <c_a c_b^dag> for the weight exp(sum c^dag A c):
// (I - e^A)^{-1} with the parity operator, (I + e^A)^{-1} without.
Operator fermion_pair_correlator(const Operator& A, bool with_parity = true);

// [I - exp(i tau gamma^0 (gamma p - m))]^{-1} gamma^0, m^2 -> m^2 - i eps_i
Operator dirac_mode_propagator(const std::array<double, 4>& p, double m, double tau, double eps_i);
// i (gamma p + m) / (p^2 - m^2 + i eps_i)
Operator dirac_propagator_limit(const std::array<double, 4>& p, double m, double eps_i);

} // namespace sqm
