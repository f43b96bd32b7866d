#pragma once

#include "sqmlab/operator.hpp"

namespace sqm {

// Page-Wootters clock of N levels coupled to a system with Hamiltonian H.
// The joint space is clock (slow leg) x system.
struct ClockSystem {
    std::size_t N = 1;
    double eps = 0.1;
    Operator H;
    Ket psi0;
    bool periodic = false;

    void validate() const;
    Operator U() const; // expm(-i eps H)
};

Ket history_state(const ClockSystem& cs);

// N <Psi| (|t><t| x O) |Psi>, equal to <psi(t)|O|psi(t)>.
cplx conditioned_expectation(const ClockSystem& cs, const Operator& O, std::size_t t);

// <Psi| |t+1><t+1| x O - |t><t| x U^dag O U |Psi>
cplx geometric_heisenberg_residual(const ClockSystem& cs, const Operator& O, std::size_t t);

// Norm of (sum_t |t+1><t| x U - I)|Psi>. Open clocks drop the slot-0 boundary
// term; periodic clocks keep it, so the result vanishes only when U^N = I.
double universe_constraint_residual(const ClockSystem& cs);

} // namespace sqm
