#pragma once

#include "sqmlab/operator.hpp"
#include "sqmlab/scm_constraints.hpp"

#include <vector>

namespace sqm {

// Diagonal Gaussian weight exp(-sum_k lambda_k a_k^dag a_k).
struct GaussianWeight {
    std::vector<cplx> lambda;
    void validate() const; // Re lambda > 0
};

// lambda = -i tau (Delta + i eps_i) for the action weight e^{i tau (p0 - E + i eps_i) a^dag a}
cplx action_exponent(double delta, double tau, double eps_i);

// <a_k^dag a_l> = delta_kl / (exp(lambda_k) - 1); throws at the pole exp(lambda) = 1
cplx gaussian_pair_correlator(const GaussianWeight& w, std::size_t k, std::size_t l);

// Same quantity as a ratio of truncated Fock traces, sum_n n e^{-lambda n} / sum_n e^{-lambda n}.
cplx truncated_fock_pair_correlator(cplx lambda, unsigned n_max);

// delta_pk / (exp(-i tau (p0 - E_p + i eps_i)) - 1), p and k index grid.modes()
cplx tau_mode_correlator(const ModeGrid& grid, double tau, double eps_i, std::size_t p, std::size_t k);

// <sqrt(tau) a(t,p) sqrt(tau) a^dag(t',p)> = (tau/T) sum_{n0} e^{-i w (t-t') eps} e^lambda / (e^lambda - 1),
// t and t' slice indices, p a spatial index vector. Equal slices give the t -> t'+ value.
cplx two_time_contraction(const ModeGrid& grid, double tau, double eps_i, long t, long tp, const std::vector<int>& p);

// Closed form of the sum above at tau = eps:
// e^{-i z eps j} / (1 - e^{-i z T}), z = E - i eps_i, j = (t - t') mod N.
cplx two_time_contraction_fine(const ModeGrid& grid, double eps_i, long t, long tp, const std::vector<int>& p);

struct SpacetimePoint {
    long t;                     // slice index
    std::vector<std::size_t> x; // site coordinates
};

// <sqrt(tau) phi(x) sqrt(tau) phi(y)>_tau for the free lattice field
// phi(t,x) = sum_k (2 E_k V)^{-1/2} (a_k(t) e^{ikx} + h.c.), V = number of sites.
cplx feynman_propagator_grid(const ModeGrid& grid, double tau, double eps_i, const SpacetimePoint& x,
                             const SpacetimePoint& y);

// Standard-QFT oracle <0| T phi_H(x) phi_H(y) |0> from exact diagonalization of
// H = sum_x pi_x^2/2 + 1/2 sum_xy phi_x K_xy phi_y, K_xy = (1/V) sum_k E_k^2 e^{ik(x-y)},
// each site truncated to n_site oscillator levels.
class FreeFieldOracle {
public:
    FreeFieldOracle(const ModeGrid& grid, unsigned n_site);
    cplx time_ordered(const SpacetimePoint& x, const SpacetimePoint& y) const;
    double ground_energy() const { return E0_; }

private:
    ModeGrid grid_;
    std::size_t V_;
    unsigned n_site_;
    double E0_ = 0;
    std::vector<double> gaps_;          // E_n - E_0
    std::vector<std::vector<cplx>> phi_n0_; // per site: <n|phi_x|0>
    double eps_;
};

} // namespace sqm
