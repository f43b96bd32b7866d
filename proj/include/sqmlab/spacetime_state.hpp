#pragma once

#include "sqmlab/operator.hpp"
#include "sqmlab/timeslab.hpp"

#include <set>
#include <utility>
#include <vector>

namespace sqm {

struct SpacetimeState {
    Operator R;                  // unit trace
    SliceLayout layout;
    Dims sites;                  // per-slice factorization, empty when absent
    Ket psi0;
    Operator H;
    double eps = 0.0;
    std::size_t N = 0;
    cplx raw_trace;              // trace before normalization

    // slice-major legs: (t, site) -> t * sites.size() + site
    Dims flat_dims() const;
};

// R = (|psi><psi| (U^dag)^N at slice 0) * cycle_shift * (x_t U), U = expm(-i eps H)
SpacetimeState build_R(const Ket& psi0, const Operator& H, double eps, std::size_t N, Dims sites = {});

Operator marginal(const SpacetimeState& st, std::size_t slice);

// Tr[(R - R^dag) (A at slice 0, B at slice t)]
cplx causality_witness(const SpacetimeState& st, const Operator& A, const Operator& B, std::size_t t = 1);

// Tr[R (A at slice 0, B at slice t)] and the same with R^dag
cplx spacetime_correlator(const SpacetimeState& st, const Operator& A, const Operator& B, std::size_t t, bool dagger);

struct PowerResult {
    Operator Rk;
    cplx trace;
    cplx pseudo_entropy; // -(1/(k-1)) log Tr[R^k], NaN for k = 1
};

PowerResult power_and_pseudoentropy(const SpacetimeState& st, unsigned k);

struct RegionReport {
    Operator R;
    double hermiticity_deviation; // |R - R^dag| / |R|
    std::vector<cplx> eigenvalues;
};

RegionReport reduce_to_region(const SpacetimeState& st,
                              const std::set<std::pair<std::size_t, std::size_t>>& region);

} // namespace sqm
