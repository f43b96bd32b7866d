#pragma once

#include "sqmlab/operator.hpp"

#include <cstdint>
#include <random>

namespace sqm {

// All randomness in the library flows through this generator.
// Hermitian matrices: complex Ginibre G (iid N(0,1/2) real and imaginary parts),
// then H = (G + G^dag)/2.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0);
    double normal();
    std::size_t index(std::size_t n);
    cplx gaussian_complex();

    Operator ginibre(std::size_t n);
    Operator hermitian(std::size_t n, double scale = 1.0);
    Ket ket(std::size_t n); // normalized

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace sqm
