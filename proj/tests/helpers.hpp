#pragma once

#include "sqmlab/operator.hpp"

#include <cmath>

namespace sqmtest {

using sqm::cplx;
using sqm::Operator;

inline Operator pauli_x() { return Operator(2, {0, 1, 1, 0}); }
inline Operator pauli_y() { return Operator(2, {0, cplx(0, -1), cplx(0, 1), 0}); }
inline Operator pauli_z() { return Operator(2, {1, 0, 0, -1}); }

// Truncated Taylor series, used as an independent exponential for small norms.
inline Operator expm_series(const Operator& a, int terms = 60)
{
    Operator term = Operator::identity(a.dims());
    Operator sum = term;
    for (int k = 1; k < terms; ++k) {
        term = term * a * cplx(1.0 / k);
        sum += term;
    }
    return sum;
}

// exp(a) by halving and Taylor; independent of the Pade path.
inline Operator expm_oracle(const Operator& a)
{
    int s = 0;
    double n = a.norm();
    while (n > 0.5) n /= 2, ++s;
    Operator r = expm_series(a * cplx(std::ldexp(1.0, -s)), 30);
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

} // namespace sqmtest
