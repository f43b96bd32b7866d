#include "sqmlab/spacetime_state.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace sqm {

Dims SpacetimeState::flat_dims() const
{
    if (sites.empty()) return layout.dims();
    Dims d;
    for (std::size_t t = 0; t < N; ++t) d.insert(d.end(), sites.begin(), sites.end());
    return d;
}

SpacetimeState build_R(const Ket& psi0, const Operator& H, double eps, std::size_t N, Dims sites)
{
    if (!psi0.is_normalized(1e-12)) throw std::invalid_argument("build_R: psi0 is not normalized");
    if (H.dim() != psi0.dim()) throw dimension_error("build_R: H and psi0 dimensions differ");
    if (!sites.empty() && product(sites) != H.dim())
        throw dimension_error("build_R: site factorization does not match the slice dimension");

    const std::size_t d = H.dim();
    const SliceLayout L(d, N, eps);
    const QuantumAction qa = build_action(L, H);
    const Operator Ud = expm(cplx(0, eps * static_cast<double>(N)) * H.with_dims({d}));
    const Operator boundary = outer(psi0.normalized(), psi0.normalized()).with_dims({d}) * Ud;
    Operator R = embed_at_slice(boundary, 0, L) * qa.exp_action;
    const cplx tr = R.trace();
    if (std::abs(tr) < 1e-300) throw std::domain_error("build_R: vanishing trace");
    R *= 1.0 / tr;
    SpacetimeState st{std::move(R), L, std::move(sites), psi0, H, eps, N, tr};
    st.R = st.R.with_dims(st.flat_dims());
    return st;
}

Operator marginal(const SpacetimeState& st, std::size_t slice)
{
    if (slice >= st.N) throw std::out_of_range("marginal: slice out of range");
    const Operator r = partial_trace(st.R.with_dims(st.layout.dims()), {slice});
    return r.with_dims(st.sites.empty() ? Dims{st.layout.d} : st.sites);
}

cplx spacetime_correlator(const SpacetimeState& st, const Operator& A, const Operator& B, std::size_t t, bool dagger)
{
    if (t == 0 || t >= st.N) throw std::out_of_range("spacetime_correlator: need 0 < t < N");
    const Operator X = embed_at_slice(A, 0, st.layout) * embed_at_slice(B, t, st.layout);
    const Operator R = dagger ? st.R.adjoint() : st.R;
    cplx s = 0;
    const std::size_t n = X.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += R(i, j) * X(j, i);
    return s;
}

cplx causality_witness(const SpacetimeState& st, const Operator& A, const Operator& B, std::size_t t)
{
    return spacetime_correlator(st, A, B, t, false) - spacetime_correlator(st, A, B, t, true);
}

PowerResult power_and_pseudoentropy(const SpacetimeState& st, unsigned k)
{
    if (k == 0) throw std::invalid_argument("power_and_pseudoentropy: k must be positive");
    Operator Rk = mpow(st.R, k);
    const cplx tr = Rk.trace();
    const cplx s = k == 1 ? cplx(std::numeric_limits<double>::quiet_NaN(), 0.0)
                          : -std::log(tr) / static_cast<double>(k - 1);
    return {std::move(Rk), tr, s};
}

RegionReport reduce_to_region(const SpacetimeState& st,
                              const std::set<std::pair<std::size_t, std::size_t>>& region)
{
    if (region.empty()) throw std::invalid_argument("reduce_to_region: empty region");
    if (st.sites.empty()) throw std::invalid_argument("reduce_to_region: state has no site factorization");
    const std::size_t S = st.sites.size();
    std::vector<std::size_t> keep;
    for (const auto& [t, x] : region) {
        if (t >= st.N || x >= S) throw std::out_of_range("reduce_to_region: (slice, site) out of range");
        keep.push_back(t * S + x);
    }
    Operator r = partial_trace(st.R.with_dims(st.flat_dims()), keep);
    const double nr = r.norm();
    const double dev = nr > 0 ? (r - r.adjoint()).norm() / nr : 0.0;
    auto ev = eigenvalues(r);
    return {std::move(r), dev, std::move(ev)};
}

} // namespace sqm
