#include "sqmlab/quantum_time.hpp"

#include <cmath>

namespace sqm {

void ClockSystem::validate() const
{
    if (N < 1) throw std::invalid_argument("clock needs N >= 1");
    if (H.dim() == 0 || H.dim() != psi0.dim()) throw dimension_error("clock: H and psi0 dimensions differ");
    if (!is_hermitian(H, 1e-12)) throw std::invalid_argument("clock: H is not hermitian");
    if (!psi0.is_normalized(1e-12)) throw std::invalid_argument("clock: psi0 is not normalized");
}

Operator ClockSystem::U() const { return expm(cplx(0, -eps) * H); }

namespace {

Operator clock_projector(std::size_t N, std::size_t t)
{
    Operator p(Dims{N});
    p(t, t) = 1.0;
    return p;
}

} // namespace

Ket history_state(const ClockSystem& cs)
{
    cs.validate();
    const std::size_t d = cs.H.dim();
    const Operator U = cs.U();
    Ket out(Dims{cs.N, d});
    Ket psi = cs.psi0;
    const double w = 1.0 / std::sqrt(static_cast<double>(cs.N));
    for (std::size_t t = 0; t < cs.N; ++t) {
        for (std::size_t i = 0; i < d; ++i) out[t * d + i] = w * psi[i];
        psi = U * psi;
    }
    return out;
}

cplx conditioned_expectation(const ClockSystem& cs, const Operator& O, std::size_t t)
{
    if (t >= cs.N) throw std::out_of_range("conditioned_expectation: slice out of range");
    if (O.dim() != cs.H.dim()) throw dimension_error("conditioned_expectation: O is not a system operator");
    const Ket psi = history_state(cs);
    return static_cast<double>(cs.N) * expect(psi, kron(clock_projector(cs.N, t), O));
}

cplx geometric_heisenberg_residual(const ClockSystem& cs, const Operator& O, std::size_t t)
{
    if (t + 1 >= cs.N) throw std::out_of_range("geometric_heisenberg_residual: needs t < N-1");
    if (O.dim() != cs.H.dim()) throw dimension_error("geometric_heisenberg_residual: O is not a system operator");
    const Ket psi = history_state(cs);
    const Operator U = cs.U();
    const Operator lhs = kron(clock_projector(cs.N, t + 1), O);
    const Operator rhs = kron(clock_projector(cs.N, t), U.adjoint() * O * U);
    return expect(psi, lhs - rhs);
}

double universe_constraint_residual(const ClockSystem& cs)
{
    const Ket psi = history_state(cs);
    const std::size_t N = cs.N, d = cs.H.dim();
    Operator shift(Dims{N});
    for (std::size_t t = 0; t + 1 < N; ++t) shift(t + 1, t) = 1.0;
    if (cs.periodic) shift(0, N - 1) += 1.0;
    const Operator K = kron(shift, cs.U()) - Operator::identity(Dims{N, d});
    Ket r = K * psi;
    if (!cs.periodic)
        for (std::size_t i = 0; i < d; ++i) r[i] = 0.0;
    return r.norm();
}

} // namespace sqm
