#pragma once

#include "sqmlab/operator.hpp"

#include <string>
#include <vector>

namespace sqm {

// Discrete frequency/momentum modes. Time: Nt frequencies w = 2 pi n0 / T.
// Space: per dimension Ns[i] sites on a periodic box of length L[i],
// momenta k_i = 2 pi n_i / L[i]. Index ranges are symmetric,
// -floor(n/2) .. n-1-floor(n/2).
struct ModeGrid {
    double T = 1.0;
    std::size_t Nt = 1;
    std::vector<std::size_t> Ns;
    std::vector<double> L;
    double mass = 0.0;

    struct Mode {
        int n0;
        std::vector<int> n;
        double omega;
        double E;
        double delta; // omega - E
    };

    ModeGrid() = default;
    ModeGrid(double T_, std::size_t Nt_, std::vector<std::size_t> Ns_, std::vector<double> L_, double m);

    double eps() const { return T / static_cast<double>(Nt); }
    std::size_t spatial_sites() const;
    std::vector<int> time_indices() const;
    std::vector<std::vector<int>> spatial_indices() const;
    std::vector<double> momentum(const std::vector<int>& n) const;
    double energy(const std::vector<int>& n) const;
    double frequency(int n0) const;
    // every (n0, n) pair, n0 outermost
    std::vector<Mode> modes() const;
};

// Linear combination sum_n alpha_n a_n + beta_n a*_n over grid modes.
struct LinearObservable {
    std::vector<cplx> alpha;
    std::vector<cplx> beta;

    explicit LinearObservable(std::size_t n = 0) : alpha(n), beta(n) {}
    static LinearObservable a(std::size_t n_modes, std::size_t i, cplx c = 1.0);
    static LinearObservable a_star(std::size_t n_modes, std::size_t i, cplx c = 1.0);
    LinearObservable& operator+=(const LinearObservable& o);
    LinearObservable operator*(cplx s) const;
    std::size_t size() const { return alpha.size(); }
};

LinearObservable operator+(LinearObservable a, const LinearObservable& b);

// {a_n, a*_m} = -i delta_nm extended bilinearly
cplx poisson_bracket(const LinearObservable& f, const LinearObservable& g);

struct ConstraintSet {
    std::vector<ModeGrid::Mode> modes;
    std::vector<LinearObservable> phi; // phi[2i] = D a_i, phi[2i+1] = D a*_i
    Operator C;                        // C_AB = {phi_A, phi_B}
    double tol = 1e-12;
    double warn_band = 1e-6;
};

ConstraintSet build_constraints(const ModeGrid& grid);
ConstraintSet empty_constraints();

enum class ConstraintClass { first_class, second_class, identically_zero };

struct ModeClassification {
    std::size_t mode;
    ConstraintClass kind;
    double delta;
    std::string note; // conditioning or tolerance remark, may be empty
};

std::vector<ModeClassification> classify(const ConstraintSet& cs);
const char* to_string(ConstraintClass c);

cplx dirac_bracket(const LinearObservable& f, const LinearObservable& g, const ConstraintSet& cs);

// {phi(t,x), pi(t',y)}_DB with fields expanded over the on-shell modes of the grid,
// phi = sum_k (2 E_k V)^{-1/2} (a_k e^{-iE t + ikx} + c.c.), V = number of sites.
cplx equal_time_bracket_reconstruction(const ModeGrid& grid, const std::vector<std::size_t>& x,
                                       const std::vector<std::size_t>& y, double t, double tp);
// (1/V) sum_k cos(E_k (t - t') - k (x - y)) summed directly
cplx field_bracket_mode_sum(const ModeGrid& grid, const std::vector<std::size_t>& x,
                            const std::vector<std::size_t>& y, double t, double tp);

// Discrete particle action S = sum_t eps [p_t (Dq)_t - p_t^2/2m - V(q_t)]
// with V(q) = sum_k V[k] q^k and D the Fourier derivative on the periodic grid.
struct ParticleAction {
    std::size_t N = 8;
    double eps = 0.1;
    double mass = 1.0;
    std::vector<double> V;
};

struct Trajectory {
    std::vector<double> q;
    std::vector<double> p;
};

// D_{tt'} = sum_n (i w_n / N) e^{i w_n eps (t - t')}, symmetric n, Nyquist term
// dropped for even N; real and antisymmetric.
std::vector<double> fourier_derivative(std::size_t N, double eps);
double action_value(const ParticleAction& a, const Trajectory& tr);

struct HamiltonResidual {
    std::vector<double> q_eq; // {q_t, S}/eps = (Dq)_t - p_t/m
    std::vector<double> p_eq; // {p_t, S}/eps = (Dp)_t + V'(q_t)
    double max_abs;
};

HamiltonResidual hamilton_constraint_residual(const ParticleAction& a, const Trajectory& tr);

} // namespace sqm
