#pragma once

#include "sqmlab/operator.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace sqm {

// Occupation-number basis over a set of bosonic legs.
class FockBasis {
public:
    using Occ = std::vector<std::uint8_t>;

    // Full product basis, per-leg cutoff n_max; ordering equals the tensor
    // ordering with leg 0 slowest.
    static FockBasis tensor(std::size_t legs, unsigned n_max);
    // States with per-leg occupation <= n_max and total number <= max_total.
    static FockBasis sector(std::size_t legs, unsigned n_max, unsigned max_total);

    std::size_t legs() const { return legs_; }
    std::size_t dim() const { return states_.size(); }
    unsigned n_max() const { return n_max_; }
    bool is_tensor() const { return tensor_; }
    const Occ& state(std::size_t i) const { return states_[i]; }
    // npos when the occupation vector lies outside the truncation
    std::size_t index_of(const Occ& o) const;
    Dims dims() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t legs_ = 0;
    unsigned n_max_ = 0;
    bool tensor_ = false;
    std::vector<Occ> states_;
    std::map<Occ, std::size_t> index_;
};

enum class Ladder { create, annihilate };

// Truncated bosonic lattice: N time slices x M spatial modes, leg (t,p) = t*M + p.
struct LatticeFock {
    std::size_t N = 1;
    std::size_t M = 1;
    std::vector<double> E; // per spatial mode
    unsigned n_max = 3;
    double eps = 0.1;
    FockBasis basis;

    static LatticeFock make(std::size_t N, std::vector<double> E, unsigned n_max, double eps);
    // number-capped variant; keeps only total occupation <= max_total
    static LatticeFock make_sector(std::size_t N, std::vector<double> E, unsigned n_max, unsigned max_total, double eps);

    double T() const { return eps * static_cast<double>(N); }
    std::size_t leg(std::size_t t, std::size_t p) const { return t * M + p; }
    std::size_t legs() const { return N * M; }
    // frequency indices -floor(N/2) .. N-1-floor(N/2)
    std::vector<int> frequency_indices() const;
    double frequency(int n0) const;
};

Operator ladder(const LatticeFock& lf, std::size_t t, std::size_t p, Ladder kind);
// sum_ij h_ij a_i^dag a_j over the lattice legs
Operator quadratic(const LatticeFock& lf, const Operator& h);
Ket vacuum(const LatticeFock& lf);

struct ExtendedMode {
    int n0 = 0;
    std::size_t p = 0;
};

// (1/sqrt N) sum_t e^{-i p0 eps t} a^dag(t,p), p0 = 2 pi n0 / T
Operator extended_creation(const LatticeFock& lf, const ExtendedMode& mode);
// S = sum_{n0,p} (p0 - E_p) A^dag A over the frequency grid
Operator free_action(const LatticeFock& lf);

struct GapResult {
    cplx gamma;
    double residual; // |[S,A^dag] - gamma A^dag| on states with room below the cutoff
};

GapResult on_shell_commutator_gap(const LatticeFock& lf, const ExtendedMode& mode, const Operator& S);

enum class Normalization { continuum, slice };

// (extended, standard) for O = a^dag a (normal ordered) or a a^dag at slice t
// on the physical one-particle state of spatial mode p.
std::pair<cplx, cplx> naive_conditioning_check(const LatticeFock& lf, std::size_t t, std::size_t p, bool normal_ordered,
                                               Normalization norm = Normalization::continuum);

// <Omega| a(t,p) a^dag(t,p) |Omega> / eps
cplx internal_contraction(const LatticeFock& lf, std::size_t t, std::size_t p);

// Physical multi-particle state prod_j A^dag(E_{p_j}) |Omega> (distinct on-shell
// modes) and the normal-ordered one-body observable sum_pq c_pq a^dag(t,p) a(t,q).
// Returns (continuum-normalized extended value, standard oracle).
std::pair<cplx, cplx> multi_mode_check(const LatticeFock& lf, const std::vector<std::size_t>& occupied,
                                       const Operator& c, std::size_t t);

struct AnomalyPoint {
    std::size_t N;
    double extended;
    double standard;
    double mismatch;
};

// Non-normal-ordered probe a a^dag at fixed T over a list of slice counts.
std::vector<AnomalyPoint> anomaly_scan(const std::vector<std::size_t>& Ns, double T, int n0 = 1);

// mismatch(N) = N - 1 in continuum normalization, so the 2N/N ratio is (2N-1)/(N-1);
// the 1/eps term alone gives 2.
double anomaly_predicted_ratio(std::size_t N);

} // namespace sqm
