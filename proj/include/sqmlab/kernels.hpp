#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace sqm::kernels {

using cplx = std::complex<double>;

// C (m x n) += A (m x k) * B (k x n), all row-major and densely packed.
using gemm_fn = void (*)(std::size_t m, std::size_t n, std::size_t k,
                         const cplx* A, const cplx* B, cplx* C);
// y (m) = A (m x n) * x (n)
using gemv_fn = void (*)(std::size_t m, std::size_t n,
                         const cplx* A, const cplx* x, cplx* y);
// sum_i conj(x_i) y_i
using dotc_fn = cplx (*)(std::size_t n, const cplx* x, const cplx* y);

struct Table {
    std::string_view isa;
    gemm_fn gemm;
    gemv_fn gemv;
    dotc_fn dotc;
};

namespace scalar {
void gemm(std::size_t m, std::size_t n, std::size_t k, const cplx* A, const cplx* B, cplx* C);
void gemv(std::size_t m, std::size_t n, const cplx* A, const cplx* x, cplx* y);
cplx dotc(std::size_t n, const cplx* x, const cplx* y);
}

#if defined(SQMLAB_HAVE_AVX2)
namespace avx2 {
void gemm(std::size_t m, std::size_t n, std::size_t k, const cplx* A, const cplx* B, cplx* C);
void gemv(std::size_t m, std::size_t n, const cplx* A, const cplx* x, cplx* y);
cplx dotc(std::size_t n, const cplx* x, const cplx* y);
}
#endif

Table scalar_table();
// Best table supported by this CPU; nullptr-free. Honors SQMLAB_ISA=scalar.
const Table& active();
// Every table usable on this machine, scalar first.
std::size_t available(const Table** out, std::size_t cap);

} // namespace sqm::kernels
