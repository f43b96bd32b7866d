#include "sqmlab/random.hpp"

#include <cmath>

namespace sqm {

double Rng::uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

std::size_t Rng::index(std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
}

cplx Rng::gaussian_complex()
{
    const double re = normal(), im = normal();
    return cplx(re, im) * std::sqrt(0.5);
}

Operator Rng::ginibre(std::size_t n)
{
    Operator g(Dims{n});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = gaussian_complex();
    return g;
}

Operator Rng::hermitian(std::size_t n, double scale)
{
    Operator g = ginibre(n);
    Operator h = 0.5 * (g + g.adjoint());
    return h * cplx(scale);
}

Ket Rng::ket(std::size_t n)
{
    Ket k(Dims{n});
    for (std::size_t i = 0; i < n; ++i) k[i] = gaussian_complex();
    return k.normalized();
}

} // namespace sqm
