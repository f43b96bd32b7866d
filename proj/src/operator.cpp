#include "sqmlab/operator.hpp"
#include "sqmlab/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sqm {

std::size_t product(const Dims& d)
{
    return std::accumulate(d.begin(), d.end(), std::size_t{1}, std::multiplies<>());
}

Operator::Operator(Dims dims) : dims_(std::move(dims)), n_(product(dims_)), a_(n_ * n_) {}

Operator::Operator(Dims dims, std::vector<cplx> entries)
    : dims_(std::move(dims)), n_(product(dims_)), a_(std::move(entries))
{
    if (a_.size() != n_ * n_)
        throw dimension_error("operator entry count " + std::to_string(a_.size()) +
                              " does not match dimension " + std::to_string(n_));
}

Operator::Operator(std::size_t n, std::initializer_list<cplx> entries)
    : Operator(Dims{n}, std::vector<cplx>(entries))
{
}

Operator Operator::identity(const Dims& dims)
{
    Operator r(dims);
    for (std::size_t i = 0; i < r.n_; ++i) r(i, i) = 1.0;
    return r;
}

Operator Operator::diag(const std::vector<cplx>& d)
{
    Operator r(Dims{d.size()});
    for (std::size_t i = 0; i < d.size(); ++i) r(i, i) = d[i];
    return r;
}

Operator Operator::with_dims(Dims d) const
{
    if (product(d) != n_) throw dimension_error("with_dims: product mismatch");
    return Operator(std::move(d), a_);
}

Operator Operator::adjoint() const
{
    Operator r(dims_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

Operator Operator::transpose() const
{
    Operator r(dims_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

cplx Operator::trace() const
{
    cplx s = 0;
    for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
}

double Operator::norm() const
{
    double s = 0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double Operator::max_abs() const
{
    double m = 0;
    for (const auto& z : a_) m = std::max(m, std::abs(z));
    return m;
}

Operator& Operator::operator+=(const Operator& o)
{
    if (o.n_ != n_) throw dimension_error("operator sum: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

Operator& Operator::operator-=(const Operator& o)
{
    if (o.n_ != n_) throw dimension_error("operator difference: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

Operator& Operator::operator*=(cplx s)
{
    for (auto& z : a_) z *= s;
    return *this;
}

Ket::Ket(Dims dims) : dims_(std::move(dims)), v_(product(dims_)) {}

Ket::Ket(Dims dims, std::vector<cplx> entries) : dims_(std::move(dims)), v_(std::move(entries))
{
    if (v_.size() != product(dims_)) throw dimension_error("ket entry count mismatch");
}

Ket::Ket(std::initializer_list<cplx> entries) : dims_{entries.size()}, v_(entries) {}

Ket Ket::basis(const Dims& dims, std::size_t index)
{
    Ket k(dims);
    if (index >= k.dim()) throw dimension_error("basis index out of range");
    k.v_[index] = 1.0;
    return k;
}

double Ket::norm() const { return std::sqrt(std::abs(inner(*this, *this))); }

Ket Ket::normalized() const
{
    const double n = norm();
    if (!(n > 0) || !std::isfinite(n)) throw std::domain_error("cannot normalize a zero or non-finite ket");
    Ket r = *this;
    r *= 1.0 / n;
    return r;
}

bool Ket::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

Ket& Ket::operator+=(const Ket& o)
{
    if (o.dim() != dim()) throw dimension_error("ket sum: dimension mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

Ket& Ket::operator*=(cplx s)
{
    for (auto& z : v_) z *= s;
    return *this;
}

Operator operator+(Operator a, const Operator& b) { return a += b; }
Operator operator-(Operator a, const Operator& b) { return a -= b; }
Operator operator*(cplx s, Operator a) { return a *= s; }
Operator operator*(Operator a, cplx s) { return a *= s; }
Ket operator+(Ket a, const Ket& b) { return a += b; }
Ket operator-(Ket a, const Ket& b) { return a += (-1.0) * b; }
Ket operator*(cplx s, Ket a) { return a *= s; }

Operator operator*(const Operator& a, const Operator& b)
{
    if (a.dim() != b.dim()) throw dimension_error("operator product: dimension mismatch");
    Operator c(a.dims());
    const std::size_t n = a.dim();
    kernels::active().gemm(n, n, n, a.data(), b.data(), c.data());
    return c;
}

Ket operator*(const Operator& a, const Ket& x)
{
    if (a.dim() != x.dim()) throw dimension_error("operator on ket: dimension mismatch");
    Ket y(a.dims());
    kernels::active().gemv(a.dim(), a.dim(), a.data(), x.data(), y.data());
    return y;
}

cplx inner(const Ket& x, const Ket& y)
{
    if (x.dim() != y.dim()) throw dimension_error("inner: dimension mismatch");
    return kernels::active().dotc(x.dim(), x.data(), y.data());
}

Operator outer(const Ket& x, const Ket& y)
{
    if (x.dim() != y.dim()) throw dimension_error("outer: dimension mismatch");
    Operator r(x.dims());
    for (std::size_t i = 0; i < x.dim(); ++i)
        for (std::size_t j = 0; j < y.dim(); ++j) r(i, j) = x[i] * std::conj(y[j]);
    return r;
}

cplx expect(const Ket& x, const Operator& a) { return inner(x, a * x); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }
Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

Operator kron(const Operator& a, const Operator& b)
{
    Dims d = a.dims();
    d.insert(d.end(), b.dims().begin(), b.dims().end());
    Operator r(d);
    const std::size_t na = a.dim(), nb = b.dim(), n = na * nb;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const cplx s = a(i, j);
            if (s == cplx{}) continue;
            for (std::size_t k = 0; k < nb; ++k) {
                cplx* row = r.data() + (i * nb + k) * n + j * nb;
                const cplx* brow = b.data() + k * nb;
                for (std::size_t l = 0; l < nb; ++l) row[l] = s * brow[l];
            }
        }
    return r;
}

Ket kron(const Ket& a, const Ket& b)
{
    Dims d = a.dims();
    d.insert(d.end(), b.dims().begin(), b.dims().end());
    std::vector<cplx> v(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t k = 0; k < b.dim(); ++k) v[i * b.dim() + k] = a[i] * b[k];
    return Ket(std::move(d), std::move(v));
}

namespace {

// Flat offsets of every multi-index over the given legs, inside the full index.
std::vector<std::size_t> leg_offsets(const Dims& dims, const std::vector<std::size_t>& legs)
{
    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) stride[i - 1] = stride[i] * dims[i];
    std::vector<std::size_t> off{0};
    for (std::size_t leg : legs) {
        std::vector<std::size_t> next;
        next.reserve(off.size() * dims[leg]);
        for (std::size_t o : off)
            for (std::size_t v = 0; v < dims[leg]; ++v) next.push_back(o + v * stride[leg]);
        off = std::move(next);
    }
    return off;
}

} // namespace

namespace {

Operator trace_one_leg(const Operator& a, std::size_t leg)
{
    const Dims& dims = a.dims();
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (i != leg) keep.push_back(i);
    Dims kd;
    for (std::size_t i : keep) kd.push_back(dims[i]);
    if (kd.empty()) kd.push_back(1);
    const auto ko = leg_offsets(dims, keep);
    const auto to = leg_offsets(dims, {leg});
    Operator r(kd);
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < ko.size(); ++i)
        for (std::size_t j = 0; j < ko.size(); ++j) {
            cplx s = 0;
            for (std::size_t t : to) s += a.data()[(ko[i] + t) * n + ko[j] + t];
            r(i, j) = s;
        }
    return r;
}

} // namespace

// Legs are traced one at a time, lowest first, so tracing in stages gives
// bit-identical results to tracing the union at once.
Operator partial_trace(const Operator& a, const std::vector<std::size_t>& keep)
{
    const Dims& dims = a.dims();
    std::vector<std::size_t> k = keep;
    std::sort(k.begin(), k.end());
    if (std::adjacent_find(k.begin(), k.end()) != k.end())
        throw dimension_error("partial_trace: duplicate leg in keep set");
    if (!k.empty() && k.back() >= dims.size())
        throw dimension_error("partial_trace: leg index out of range");
    Operator r = a;
    std::size_t removed = 0;
    for (std::size_t i = 0, j = 0; i < dims.size(); ++i) {
        if (j < k.size() && k[j] == i) {
            ++j;
            continue;
        }
        r = trace_one_leg(r, i - removed);
        ++removed;
    }
    if (k.empty()) r = r.with_dims({1});
    return r;
}

namespace {

double norm1(const Operator& a)
{
    double m = 0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        double s = 0;
        for (std::size_t i = 0; i < a.dim(); ++i) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

struct LU {
    std::vector<cplx> a;
    std::vector<std::size_t> piv;
    std::size_t n;
};

LU lu_factor(const Operator& m)
{
    LU f{m.entries(), std::vector<std::size_t>(m.dim()), m.dim()};
    const std::size_t n = f.n;
    auto& a = f.a;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        double best = std::abs(a[c * n + c]);
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > best) best = std::abs(a[r * n + c]), p = r;
        f.piv[c] = p;
        if (best == 0.0) throw singular_matrix_error("LU: exactly singular pivot");
        if (p != c)
            for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[p * n + j]);
        const cplx d = a[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const cplx l = a[r * n + c] / d;
            a[r * n + c] = l;
            if (l == cplx{}) continue;
            for (std::size_t j = c + 1; j < n; ++j) a[r * n + j] -= l * a[c * n + j];
        }
    }
    return f;
}

// Solve A X = B in place (B square of the same size, row-major).
void lu_solve(const LU& f, std::vector<cplx>& b)
{
    const std::size_t n = f.n;
    const auto& a = f.a;
    for (std::size_t c = 0; c < n; ++c)
        if (f.piv[c] != c)
            for (std::size_t j = 0; j < n; ++j) std::swap(b[c * n + j], b[f.piv[c] * n + j]);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < r; ++c) {
            const cplx l = a[r * n + c];
            if (l == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) b[r * n + j] -= l * b[c * n + j];
        }
    for (std::size_t r = n; r-- > 0;) {
        for (std::size_t c = r + 1; c < n; ++c) {
            const cplx u = a[r * n + c];
            if (u == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) b[r * n + j] -= u * b[c * n + j];
        }
        const cplx d = a[r * n + r];
        for (std::size_t j = 0; j < n; ++j) b[r * n + j] /= d;
    }
}

} // namespace

// Scaling and squaring with the degree-13 Pade approximant (Higham 2005).
Operator expm(const Operator& a)
{
    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    static constexpr double theta13 = 5.371920351148152;

    const double nrm = norm1(a);
    if (!std::isfinite(nrm)) throw std::domain_error("expm: non-finite input");
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    Operator A = a * cplx(std::ldexp(1.0, -s));

    const Operator Id = Operator::identity(a.dims());
    const Operator A2 = A * A, A4 = A2 * A2, A6 = A4 * A2;
    Operator inner_u = b[13] * A6 + b[11] * A4 + b[9] * A2;
    Operator U = A * (A6 * inner_u + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * Id);
    Operator inner_v = b[12] * A6 + b[10] * A4 + b[8] * A2;
    Operator V = A6 * inner_v + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * Id;

    std::vector<cplx> rhs = (V + U).entries();
    lu_solve(lu_factor(V - U), rhs);
    Operator R(a.dims(), std::move(rhs));
    for (int i = 0; i < s; ++i) R = R * R;
    return R;
}

Operator inv(const Operator& a, const InvOptions& opt)
{
    const auto sv = singular_values(a);
    const double smax = sv.empty() ? 0.0 : sv.front();
    const double smin = sv.empty() ? 0.0 : sv.back();
    if (smin < 1e-13 * smax || smin == 0.0)
        throw singular_matrix_error("inv: smallest singular value below 1e-13*|A|");
    if (smax / smin > opt.max_condition)
        throw singular_matrix_error("inv: condition number exceeds configured bound");
    std::vector<cplx> x = Operator::identity(a.dims()).entries();
    lu_solve(lu_factor(a), x);
    return Operator(a.dims(), std::move(x));
}

Operator mpow(const Operator& a, unsigned k)
{
    Operator r = Operator::identity(a.dims());
    Operator base = a;
    while (k) {
        if (k & 1u) r = r * base;
        k >>= 1u;
        if (k) base = base * base;
    }
    return r;
}

double max_abs_diff(const Operator& a, const Operator& b)
{
    if (a.dim() != b.dim()) throw dimension_error("max_abs_diff: dimension mismatch");
    double m = 0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    return m;
}

double max_abs_diff(const Ket& a, const Ket& b)
{
    if (a.dim() != b.dim()) throw dimension_error("max_abs_diff: dimension mismatch");
    double m = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool is_hermitian(const Operator& a, double tol) { return max_abs_diff(a, a.adjoint()) <= tol; }

bool is_unitary(const Operator& a, double tol)
{
    return max_abs_diff(a * a.adjoint(), Operator::identity(a.dims())) <= tol;
}

namespace {

Eigen::MatrixXcd to_eigen(const Operator& a)
{
    const auto n = static_cast<Eigen::Index>(a.dim());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(i, j);
    return m;
}

} // namespace

std::vector<double> hermitian_eigenvalues(const Operator& a)
{
    Eigen::MatrixXcd m = to_eigen(a);
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

Eigensystem hermitian_eigensystem(const Operator& a)
{
    Eigen::MatrixXcd m = to_eigen(a);
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const auto& ev = es.eigenvalues();
    const auto& V = es.eigenvectors();
    Operator vec(a.dims());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            vec(i, j) = V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return {{ev.data(), ev.data() + ev.size()}, std::move(vec)};
}

std::vector<cplx> eigenvalues(const Operator& a)
{
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(a), false);
    const auto& ev = es.eigenvalues();
    std::vector<cplx> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

std::vector<double> singular_values(const Operator& a)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a));
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

} // namespace sqm
