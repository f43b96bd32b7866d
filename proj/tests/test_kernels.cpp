#include "sqmlab/kernels.hpp"
#include "sqmlab/random.hpp"

#include <doctest.h>

#include <vector>

using namespace sqm;

namespace {

std::vector<cplx> random_buf(Rng& rng, std::size_t n)
{
    std::vector<cplx> v(n);
    for (auto& z : v) z = rng.gaussian_complex();
    return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("every available kernel matches the scalar reference")
{
    const kernels::Table* tabs[4];
    const std::size_t nt = kernels::available(tabs, 4);
    REQUIRE(nt >= 1);
    CHECK(tabs[0]->isa == "scalar");
    MESSAGE("active isa: " << kernels::active().isa << ", available: " << nt);

    Rng rng(42);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& K = *tabs[t];
        for (std::size_t m : {1u, 2u, 3u, 7u, 16u, 33u})
            for (std::size_t n : {1u, 2u, 5u, 8u, 17u})
                for (std::size_t k : {1u, 3u, 8u, 13u}) {
                    const auto A = random_buf(rng, m * k), B = random_buf(rng, k * n), C0 = random_buf(rng, m * n);
                    auto Cs = C0, Cv = C0;
                    kernels::scalar::gemm(m, n, k, A.data(), B.data(), Cs.data());
                    K.gemm(m, n, k, A.data(), B.data(), Cv.data());
                    CHECK(max_diff(Cs, Cv) < 1e-12 * (1.0 + k));
                }
        for (std::size_t n : {1u, 2u, 3u, 10u, 31u, 64u}) {
            const auto A = random_buf(rng, n * n), x = random_buf(rng, n), y = random_buf(rng, n);
            std::vector<cplx> ys(n), yv(n);
            kernels::scalar::gemv(n, n, A.data(), x.data(), ys.data());
            K.gemv(n, n, A.data(), x.data(), yv.data());
            CHECK(max_diff(ys, yv) < 1e-12 * n);
            CHECK(std::abs(kernels::scalar::dotc(n, x.data(), y.data()) - K.dotc(n, x.data(), y.data())) < 1e-12 * n);
        }
    }
}

TEST_CASE("scalar kernels against naive complex arithmetic")
{
    Rng rng(43);
    const std::size_t m = 5, n = 4, k = 3;
    const auto A = random_buf(rng, m * k), B = random_buf(rng, k * n);
    std::vector<cplx> C(m * n), ref(m * n);
    kernels::scalar::gemm(m, n, k, A.data(), B.data(), C.data());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < k; ++l) ref[i * n + j] += A[i * k + l] * B[l * n + j];
    CHECK(max_diff(C, ref) < 1e-14);
    const cplx d = kernels::scalar::dotc(3, A.data(), B.data());
    CHECK(std::abs(d - (std::conj(A[0]) * B[0] + std::conj(A[1]) * B[1] + std::conj(A[2]) * B[2])) < 1e-14);
}
