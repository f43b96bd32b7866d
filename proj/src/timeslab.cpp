#include "sqmlab/timeslab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sqm {

SliceLayout::SliceLayout(std::size_t d_, std::size_t N_, double eps_, std::size_t cap_)
    : d(d_), N(N_), eps(eps_), cap(cap_)
{
    if (N < 1 || d < 1) throw std::invalid_argument("slice layout needs N >= 1 and d >= 1");
    total();
}

std::size_t SliceLayout::total() const
{
    std::size_t n = 1;
    for (std::size_t i = 0; i < N; ++i) {
        n *= d;
        if (n > cap) throw std::length_error("slice layout exceeds cap " + std::to_string(cap));
    }
    return n;
}

Operator cycle_shift(const SliceLayout& layout)
{
    const std::size_t n = layout.total(), d = layout.d, N = layout.N;
    Operator C(layout.dims());
    // stride of the last leg is 1, of slice 0 is d^{N-1}
    const std::size_t top = n / d;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const std::size_t last = idx % d;
        const std::size_t rest = idx / d; // i0..i_{N-2}
        const std::size_t out = N == 1 ? idx : last * top + rest;
        C(out, idx) = 1.0;
    }
    return C;
}

Operator embed_at_slice(const Operator& O, std::size_t t, const SliceLayout& layout)
{
    if (O.dim() != layout.d) throw dimension_error("embed_at_slice: operator is not d x d");
    if (t >= layout.N) throw std::out_of_range("embed_at_slice: slice out of range");
    const std::size_t before = static_cast<std::size_t>(std::pow(layout.d, t));
    const std::size_t after = layout.total() / (before * layout.d);
    Operator r = kron(kron(Operator::identity(before), O.with_dims({layout.d})), Operator::identity(after));
    return r.with_dims(layout.dims());
}

namespace {

Operator tensor_power(const Operator& U, std::size_t N)
{
    Operator r = U;
    for (std::size_t i = 1; i < N; ++i) r = kron(r, U);
    return r;
}

// Tr[A B] without forming the product
cplx trace_of_product(const Operator& a, const Operator& b)
{
    cplx s = 0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += a(i, j) * b(j, i);
    return s;
}

std::vector<Insert> sorted_checked(const std::vector<Insert>& inserts, const SliceLayout& layout)
{
    std::vector<Insert> v = inserts;
    std::stable_sort(v.begin(), v.end(), [](const Insert& a, const Insert& b) { return a.slice < b.slice; });
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].slice >= layout.N) throw std::out_of_range("insert slice out of range");
        if (v[i].op.dim() != layout.d) throw dimension_error("insert operator is not d x d");
        if (i && v[i].slice == v[i - 1].slice)
            throw std::invalid_argument("two inserts on slice " + std::to_string(v[i].slice));
    }
    return v;
}

} // namespace

QuantumAction build_action(const SliceLayout& layout, const Operator& H)
{
    if (H.dim() != layout.d) throw dimension_error("build_action: H is not d x d");
    if (!is_hermitian(H, 1e-12)) throw std::invalid_argument("build_action: H is not hermitian");
    const Operator U = expm(cplx(0, -layout.eps) * H.with_dims({layout.d}));
    Operator E = cycle_shift(layout) * tensor_power(U, layout.N).with_dims(layout.dims());
    return {layout, H, std::move(E)};
}

cplx trace_theorem_lhs(const QuantumAction& qa, const std::vector<Insert>& inserts)
{
    const auto v = sorted_checked(inserts, qa.layout);
    if (v.empty()) return qa.exp_action.trace();
    Operator prod = embed_at_slice(v[0].op, v[0].slice, qa.layout);
    for (std::size_t i = 1; i < v.size(); ++i) prod = prod * embed_at_slice(v[i].op, v[i].slice, qa.layout);
    return trace_of_product(qa.exp_action, prod);
}

cplx trace_theorem_rhs(const QuantumAction& qa, const std::vector<Insert>& inserts)
{
    const auto v = sorted_checked(inserts, qa.layout);
    const double eps = qa.layout.eps;
    const Operator H = qa.H.with_dims({qa.layout.d});
    Operator acc = expm(cplx(0, -eps * static_cast<double>(qa.layout.N)) * H);
    // latest insert sits leftmost
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
        const double s = eps * static_cast<double>(it->slice);
        const Operator OH = expm(cplx(0, s) * H) * it->op.with_dims({qa.layout.d}) * expm(cplx(0, -s) * H);
        acc = acc * OH;
    }
    return acc.trace();
}

cplx constraint_expectation(const QuantumAction& qa, const Operator& O, std::size_t t,
                            const std::optional<Boundary>& boundary)
{
    const auto& L = qa.layout;
    if (t >= L.N) throw std::out_of_range("constraint_expectation: slice out of range");
    if (boundary && t + 1 >= L.N) throw std::out_of_range("constraint_expectation: boundary case needs t < N-1");
    const Operator& E = qa.exp_action;
    const Operator Ot = embed_at_slice(O, t, L);
    const Operator gap = E * Ot * E.adjoint() - Ot;
    if (!boundary) return trace_of_product(E, gap);
    const Operator B = embed_at_slice(outer(boundary->q, boundary->qprime).with_dims({L.d}), 0, L);
    return trace_of_product(B * E, gap);
}

} // namespace sqm
