// Compiled with -mavx2 -mfma; only called after a runtime CPU check.
#include "sqmlab/kernels.hpp"

#include <immintrin.h>

namespace sqm::kernels::avx2 {

namespace {

// (a0,a1) * (b0,b1) for two packed complex pairs, a given as split re/im broadcasts
inline __m256d cmul(__m256d ar, __m256d ai, __m256d b)
{
    const __m256d bs = _mm256_permute_pd(b, 0b0101);
    return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bs));
}

// elementwise complex product of two packed vectors
inline __m256d cmul_vv(__m256d a, __m256d b)
{
    const __m256d ar = _mm256_movedup_pd(a);
    const __m256d ai = _mm256_permute_pd(a, 0b1111);
    return cmul(ar, ai, b);
}

inline cplx hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    double out[2];
    _mm_storeu_pd(out, s);
    return {out[0], out[1]};
}

} // namespace

void gemm(std::size_t m, std::size_t n, std::size_t k, const cplx* A, const cplx* B, cplx* C)
{
    const std::size_t n2 = n & ~std::size_t{1};
    for (std::size_t i = 0; i < m; ++i) {
        double* c = reinterpret_cast<double*>(C + i * n);
        for (std::size_t l = 0; l < k; ++l) {
            const cplx a = A[i * k + l];
            if (a == cplx{}) continue;
            const __m256d ar = _mm256_set1_pd(a.real());
            const __m256d ai = _mm256_set1_pd(a.imag());
            const double* b = reinterpret_cast<const double*>(B + l * n);
            std::size_t j = 0;
            for (; j < n2; j += 2) {
                const __m256d bv = _mm256_loadu_pd(b + 2 * j);
                const __m256d cv = _mm256_loadu_pd(c + 2 * j);
                _mm256_storeu_pd(c + 2 * j, _mm256_add_pd(cv, cmul(ar, ai, bv)));
            }
            if (j < n) {
                const double br = b[2 * j], bi = b[2 * j + 1];
                c[2 * j] += a.real() * br - a.imag() * bi;
                c[2 * j + 1] += a.real() * bi + a.imag() * br;
            }
        }
    }
}

void gemv(std::size_t m, std::size_t n, const cplx* A, const cplx* x, cplx* y)
{
    const std::size_t n2 = n & ~std::size_t{1};
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < m; ++i) {
        const double* a = reinterpret_cast<const double*>(A + i * n);
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j < n2; j += 2)
            acc = _mm256_add_pd(acc, cmul_vv(_mm256_loadu_pd(a + 2 * j), _mm256_loadu_pd(xd + 2 * j)));
        cplx s = hsum(acc);
        if (j < n) s += A[i * n + j] * x[j];
        y[i] = s;
    }
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y)
{
    const std::size_t n2 = n & ~std::size_t{1};
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    const __m256d conj = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j < n2; j += 2) {
        const __m256d xv = _mm256_xor_pd(_mm256_loadu_pd(xd + 2 * j), conj);
        acc = _mm256_add_pd(acc, cmul_vv(xv, _mm256_loadu_pd(yd + 2 * j)));
    }
    cplx s = hsum(acc);
    if (j < n) s += std::conj(x[j]) * y[j];
    return s;
}

} // namespace sqm::kernels::avx2
