#include "sqmlab/kernels.hpp"

#include <cstdlib>
#include <string>

namespace sqm::kernels {

Table scalar_table() { return {"scalar", scalar::gemm, scalar::gemv, scalar::dotc}; }

namespace {

bool cpu_has_avx2()
{
#if defined(SQMLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Table pick()
{
    const char* env = std::getenv("SQMLAB_ISA");
    if (env && std::string(env) == "scalar") return scalar_table();
#if defined(SQMLAB_HAVE_AVX2)
    if (cpu_has_avx2()) return {"avx2", avx2::gemm, avx2::gemv, avx2::dotc};
#endif
    return scalar_table();
}

} // namespace

const Table& active()
{
    static const Table t = pick();
    return t;
}

std::size_t available(const Table** out, std::size_t cap)
{
    static const Table s = scalar_table();
    std::size_t n = 0;
    if (n < cap) out[n++] = &s;
#if defined(SQMLAB_HAVE_AVX2)
    static const Table v{"avx2", avx2::gemm, avx2::gemv, avx2::dotc};
    if (cpu_has_avx2() && n < cap) out[n++] = &v;
#endif
    return n;
}

} // namespace sqm::kernels
