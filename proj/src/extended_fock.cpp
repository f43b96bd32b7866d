#include "sqmlab/extended_fock.hpp"

#include <cmath>
#include <numbers>

namespace sqm {

namespace {

void fill_states(std::vector<FockBasis::Occ>& out, FockBasis::Occ& cur, std::size_t leg, unsigned n_max, unsigned left)
{
    if (leg == cur.size()) {
        out.push_back(cur);
        return;
    }
    for (unsigned n = 0; n <= std::min(n_max, left); ++n) {
        cur[leg] = static_cast<std::uint8_t>(n);
        fill_states(out, cur, leg + 1, n_max, left - n);
    }
    cur[leg] = 0;
}

} // namespace

FockBasis FockBasis::tensor(std::size_t legs, unsigned n_max)
{
    FockBasis b;
    b.legs_ = legs;
    b.n_max_ = n_max;
    b.tensor_ = true;
    double total = std::pow(n_max + 1.0, static_cast<double>(legs));
    if (total > 1 << 16) throw std::length_error("FockBasis::tensor: dimension exceeds cap");
    Occ cur(legs, 0);
    fill_states(b.states_, cur, 0, n_max, n_max * static_cast<unsigned>(legs));
    for (std::size_t i = 0; i < b.states_.size(); ++i) b.index_.emplace(b.states_[i], i);
    return b;
}

FockBasis FockBasis::sector(std::size_t legs, unsigned n_max, unsigned max_total)
{
    FockBasis b;
    b.legs_ = legs;
    b.n_max_ = n_max;
    b.tensor_ = false;
    Occ cur(legs, 0);
    fill_states(b.states_, cur, 0, n_max, max_total);
    if (b.states_.size() > 1 << 16) throw std::length_error("FockBasis::sector: dimension exceeds cap");
    for (std::size_t i = 0; i < b.states_.size(); ++i) b.index_.emplace(b.states_[i], i);
    return b;
}

std::size_t FockBasis::index_of(const Occ& o) const
{
    auto it = index_.find(o);
    return it == index_.end() ? npos : it->second;
}

Dims FockBasis::dims() const
{
    if (tensor_) return Dims(legs_, n_max_ + 1);
    return Dims{dim()};
}

LatticeFock LatticeFock::make(std::size_t N, std::vector<double> E, unsigned n_max, double eps)
{
    if (N < 1 || E.empty() || n_max < 1) throw std::invalid_argument("LatticeFock: need N >= 1, M >= 1, n_max >= 1");
    LatticeFock lf;
    lf.N = N;
    lf.M = E.size();
    lf.E = std::move(E);
    lf.n_max = n_max;
    lf.eps = eps;
    lf.basis = FockBasis::tensor(N * lf.M, n_max);
    return lf;
}

LatticeFock LatticeFock::make_sector(std::size_t N, std::vector<double> E, unsigned n_max, unsigned max_total,
                                     double eps)
{
    LatticeFock lf = make(1, E, n_max, eps);
    lf.N = N;
    lf.basis = FockBasis::sector(N * lf.M, n_max, max_total);
    return lf;
}

std::vector<int> LatticeFock::frequency_indices() const
{
    std::vector<int> v;
    const int lo = -static_cast<int>(N / 2);
    for (std::size_t i = 0; i < N; ++i) v.push_back(lo + static_cast<int>(i));
    return v;
}

double LatticeFock::frequency(int n0) const { return 2.0 * std::numbers::pi * n0 / T(); }

Operator ladder(const LatticeFock& lf, std::size_t t, std::size_t p, Ladder kind)
{
    if (t >= lf.N || p >= lf.M) throw std::out_of_range("ladder: (t,p) out of range");
    const FockBasis& b = lf.basis;
    const std::size_t leg = lf.leg(t, p);
    Operator a(b.dims());
    for (std::size_t j = 0; j < b.dim(); ++j) {
        FockBasis::Occ o = b.state(j);
        const unsigned n = o[leg];
        if (kind == Ladder::annihilate) {
            if (n == 0) continue;
            o[leg] = static_cast<std::uint8_t>(n - 1);
            a(b.index_of(o), j) = std::sqrt(static_cast<double>(n));
        } else {
            if (n >= b.n_max()) continue;
            o[leg] = static_cast<std::uint8_t>(n + 1);
            const std::size_t i = b.index_of(o);
            if (i != FockBasis::npos) a(i, j) = std::sqrt(n + 1.0);
        }
    }
    return a;
}

Operator quadratic(const LatticeFock& lf, const Operator& h)
{
    const FockBasis& b = lf.basis;
    const std::size_t L = lf.legs();
    if (h.dim() != L) throw dimension_error("quadratic: coefficient matrix is not legs x legs");
    Operator q(b.dims());
    for (std::size_t col = 0; col < b.dim(); ++col) {
        const FockBasis::Occ& o = b.state(col);
        for (std::size_t j = 0; j < L; ++j) {
            if (o[j] == 0) continue;
            FockBasis::Occ lowered = o;
            lowered[j] -= 1;
            const double aj = std::sqrt(static_cast<double>(o[j]));
            for (std::size_t i = 0; i < L; ++i) {
                const cplx c = h(i, j);
                if (c == cplx{}) continue;
                FockBasis::Occ raised = lowered;
                if (raised[i] >= b.n_max()) continue;
                raised[i] += 1;
                const std::size_t row = b.index_of(raised);
                if (row == FockBasis::npos) continue;
                q(row, col) += c * aj * std::sqrt(static_cast<double>(raised[i]));
            }
        }
    }
    return q;
}

Ket vacuum(const LatticeFock& lf)
{
    Ket v(lf.basis.dims());
    v[lf.basis.index_of(FockBasis::Occ(lf.legs(), 0))] = 1.0;
    return v;
}

namespace {

// one-particle amplitudes over legs for a single extended mode with frequency w
std::vector<cplx> mode_profile(const LatticeFock& lf, double w, std::size_t p)
{
    std::vector<cplx> u(lf.legs());
    const double s = 1.0 / std::sqrt(static_cast<double>(lf.N));
    for (std::size_t t = 0; t < lf.N; ++t) u[lf.leg(t, p)] = s * std::exp(cplx(0, -w * lf.eps * t));
    return u;
}

Operator creation_from_profile(const LatticeFock& lf, const std::vector<cplx>& u)
{
    Operator A(lf.basis.dims());
    for (std::size_t t = 0; t < lf.N; ++t)
        for (std::size_t p = 0; p < lf.M; ++p) {
            const cplx c = u[lf.leg(t, p)];
            if (c != cplx{}) A += ladder(lf, t, p, Ladder::create) * c;
        }
    return A;
}

// continuum factor T/eps for a one-body observable in a normalized state
double continuum_factor(const LatticeFock& lf) { return lf.T() / lf.eps; }

} // namespace

Operator extended_creation(const LatticeFock& lf, const ExtendedMode& mode)
{
    if (mode.p >= lf.M) throw std::out_of_range("extended_creation: spatial mode out of range");
    return creation_from_profile(lf, mode_profile(lf, lf.frequency(mode.n0), mode.p));
}

Operator free_action(const LatticeFock& lf)
{
    const std::size_t L = lf.legs();
    Operator h(Dims{L});
    for (int n0 : lf.frequency_indices()) {
        const double w = lf.frequency(n0);
        for (std::size_t p = 0; p < lf.M; ++p) {
            const auto u = mode_profile(lf, w, p);
            const double gap = w - lf.E[p];
            for (std::size_t i = 0; i < L; ++i)
                for (std::size_t j = 0; j < L; ++j) h(i, j) += gap * u[i] * std::conj(u[j]);
        }
    }
    return quadratic(lf, h);
}

GapResult on_shell_commutator_gap(const LatticeFock& lf, const ExtendedMode& mode, const Operator& S)
{
    const Operator Ad = extended_creation(lf, mode);
    const Operator K = commutator(S, Ad);
    const Ket vac = vacuum(lf);
    const Ket one = Ad * vac;
    const cplx gamma = inner(one, K * vac) / inner(one, one);

    // test [S,A^dag] = gamma A^dag on basis states that can absorb one more quantum
    const Operator D = K - Ad * gamma;
    const FockBasis& b = lf.basis;
    const unsigned cap = b.n_max() - 1;
    unsigned max_total = 0;
    for (std::size_t j = 0; j < b.dim(); ++j) {
        unsigned s = 0;
        for (auto n : b.state(j)) s += n;
        max_total = std::max(max_total, s);
    }
    double res = 0;
    for (std::size_t j = 0; j < b.dim(); ++j) {
        const auto& o = b.state(j);
        unsigned s = 0;
        bool room = true;
        for (auto n : o) s += n, room = room && n <= cap;
        if (!room || (!b.is_tensor() && s + 1 > max_total)) continue;
        for (std::size_t i = 0; i < b.dim(); ++i) res = std::max(res, std::abs(D(i, j)));
    }
    return {gamma, res};
}

std::pair<cplx, cplx> naive_conditioning_check(const LatticeFock& lf, std::size_t t, std::size_t p, bool normal_ordered,
                                               Normalization norm)
{
    if (t >= lf.N || p >= lf.M) throw std::out_of_range("naive_conditioning_check: (t,p) out of range");
    const Ket psi = creation_from_profile(lf, mode_profile(lf, lf.E[p], p)) * vacuum(lf);
    const Operator a = ladder(lf, t, p, Ladder::annihilate), ad = ladder(lf, t, p, Ladder::create);
    const Operator O = normal_ordered ? ad * a : a * ad;
    cplx ext = expect(psi, O) / inner(psi, psi);
    if (norm == Normalization::continuum) ext *= continuum_factor(lf);

    // standard oracle: M modes, external time, H = sum E b^dag b
    const LatticeFock std_space = LatticeFock::make(1, lf.E, 3, lf.eps);
    Operator H(std_space.basis.dims());
    for (std::size_t q = 0; q < lf.M; ++q)
        H += ladder(std_space, 0, q, Ladder::create) * ladder(std_space, 0, q, Ladder::annihilate) * cplx(lf.E[q]);
    const Operator b = ladder(std_space, 0, p, Ladder::annihilate), bd = ladder(std_space, 0, p, Ladder::create);
    const Ket psit = expm(cplx(0, -lf.eps * static_cast<double>(t)) * H) * (bd * vacuum(std_space));
    const cplx st = expect(psit, normal_ordered ? bd * b : b * bd);
    return {ext, st};
}

cplx internal_contraction(const LatticeFock& lf, std::size_t t, std::size_t p)
{
    const Ket vac = vacuum(lf);
    return expect(vac, ladder(lf, t, p, Ladder::annihilate) * ladder(lf, t, p, Ladder::create)) / lf.eps;
}

std::pair<cplx, cplx> multi_mode_check(const LatticeFock& lf, const std::vector<std::size_t>& occupied,
                                       const Operator& c, std::size_t t)
{
    if (c.dim() != lf.M) throw dimension_error("multi_mode_check: coefficient matrix is not M x M");
    Ket psi = vacuum(lf);
    for (std::size_t p : occupied) psi = creation_from_profile(lf, mode_profile(lf, lf.E[p], p)) * psi;
    Operator h(Dims{lf.legs()});
    for (std::size_t p = 0; p < lf.M; ++p)
        for (std::size_t q = 0; q < lf.M; ++q) h(lf.leg(t, p), lf.leg(t, q)) = c(p, q);
    const cplx ext = expect(psi, quadratic(lf, h)) / inner(psi, psi) * continuum_factor(lf);

    const LatticeFock std_space = LatticeFock::make(1, lf.E, 2, lf.eps);
    Operator H(std_space.basis.dims());
    for (std::size_t q = 0; q < lf.M; ++q)
        H += ladder(std_space, 0, q, Ladder::create) * ladder(std_space, 0, q, Ladder::annihilate) * cplx(lf.E[q]);
    Ket phi = vacuum(std_space);
    for (std::size_t p : occupied) phi = ladder(std_space, 0, p, Ladder::create) * phi;
    phi = phi.normalized();
    const Ket phit = expm(cplx(0, -lf.eps * static_cast<double>(t)) * H) * phi;
    Operator O(std_space.basis.dims());
    for (std::size_t p = 0; p < lf.M; ++p)
        for (std::size_t q = 0; q < lf.M; ++q)
            if (c(p, q) != cplx{})
                O += ladder(std_space, 0, p, Ladder::create) * ladder(std_space, 0, q, Ladder::annihilate) * c(p, q);
    return {ext, expect(phit, O)};
}

std::vector<AnomalyPoint> anomaly_scan(const std::vector<std::size_t>& Ns, double T, int n0)
{
    std::vector<AnomalyPoint> out;
    for (std::size_t N : Ns) {
        const double eps = T / static_cast<double>(N);
        const double E = 2.0 * std::numbers::pi * n0 / T;
        const LatticeFock lf = LatticeFock::make_sector(N, {E}, 2, 2, eps);
        const auto [ext, st] = naive_conditioning_check(lf, N / 2, 0, false, Normalization::continuum);
        out.push_back({N, ext.real(), st.real(), ext.real() - st.real()});
    }
    return out;
}

double anomaly_predicted_ratio(std::size_t N)
{
    const double n = static_cast<double>(N);
    return (2 * n - 1) / (n - 1);
}

} // namespace sqm
