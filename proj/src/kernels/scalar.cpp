#include "sqmlab/kernels.hpp"

namespace sqm::kernels::scalar {

void gemm(std::size_t m, std::size_t n, std::size_t k, const cplx* A, const cplx* B, cplx* C)
{
    for (std::size_t i = 0; i < m; ++i) {
        cplx* c = C + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const cplx a = A[i * k + l];
            if (a == cplx{}) continue;
            const double ar = a.real(), ai = a.imag();
            const cplx* b = B + l * n;
            for (std::size_t j = 0; j < n; ++j) {
                const double br = b[j].real(), bi = b[j].imag();
                c[j] = {c[j].real() + (ar * br - ai * bi), c[j].imag() + (ar * bi + ai * br)};
            }
        }
    }
}

void gemv(std::size_t m, std::size_t n, const cplx* A, const cplx* x, cplx* y)
{
    for (std::size_t i = 0; i < m; ++i) {
        double re = 0, im = 0;
        const cplx* a = A + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            re += a[j].real() * x[j].real() - a[j].imag() * x[j].imag();
            im += a[j].real() * x[j].imag() + a[j].imag() * x[j].real();
        }
        y[i] = {re, im};
    }
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y)
{
    double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

} // namespace sqm::kernels::scalar
