#pragma once

#include "sqmlab/operator.hpp"

#include <optional>
#include <vector>

namespace sqm {

// N time slices of a d-dimensional space, slice 0 is the slowest tensor leg.
struct SliceLayout {
    std::size_t d = 2;
    std::size_t N = 1;
    double eps = 0.1;
    std::size_t cap = 4096;

    SliceLayout() = default;
    SliceLayout(std::size_t d_, std::size_t N_, double eps_, std::size_t cap_ = 4096);
    Dims dims() const { return Dims(N, d); }
    std::size_t total() const;
};

// |i0 i1 ... i_{N-1}> -> |i_{N-1} i0 ... i_{N-2}>
Operator cycle_shift(const SliceLayout& layout);

// I^{x t} x O x I^{x (N-1-t)}
Operator embed_at_slice(const Operator& O, std::size_t t, const SliceLayout& layout);

struct QuantumAction {
    SliceLayout layout;
    Operator H;
    Operator exp_action; // cycle_shift * (x_t expm(-i eps H))
};

QuantumAction build_action(const SliceLayout& layout, const Operator& H);

struct Insert {
    Operator op;
    std::size_t slice;
};

// Tr[exp_action * prod_t embed(O_t, t)]
cplx trace_theorem_lhs(const QuantumAction& qa, const std::vector<Insert>& inserts);
// tr[expm(-i eps N H) * T prod O_H(eps t)] on one slice
cplx trace_theorem_rhs(const QuantumAction& qa, const std::vector<Insert>& inserts);

struct Boundary {
    Ket q;
    Ket qprime;
};

// Tr[B E (E O_t E^dag - O_t)], B = |q><q'| at slice 0 (identity when absent).
cplx constraint_expectation(const QuantumAction& qa, const Operator& O, std::size_t t,
                            const std::optional<Boundary>& boundary = std::nullopt);

} // namespace sqm
