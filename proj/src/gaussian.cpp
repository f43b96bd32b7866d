#include "sqmlab/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace sqm {

void GaussianWeight::validate() const
{
    for (const cplx& l : lambda)
        if (!(l.real() > 0)) throw std::domain_error("Gaussian weight needs Re(lambda) > 0 for a convergent trace");
}

cplx action_exponent(double delta, double tau, double eps_i) { return cplx(0, -tau) * cplx(delta, eps_i); }

namespace {

cplx bose(cplx lambda)
{
    const cplx den = std::exp(lambda) - 1.0;
    if (std::abs(den) < 1e-300 || std::abs(lambda) < 1e-300)
        throw std::domain_error("Gaussian pair correlator evaluated at its pole exp(lambda) = 1");
    return 1.0 / den;
}

// <a a^dag> = e^lambda / (e^lambda - 1) = 1 / (1 - e^{-lambda})
cplx bose_plus_one(cplx lambda)
{
    const cplx den = 1.0 - std::exp(-lambda);
    if (std::abs(den) < 1e-300) throw std::domain_error("Gaussian pair correlator evaluated at its pole exp(lambda) = 1");
    return 1.0 / den;
}

double site_coord(const ModeGrid& g, std::size_t dim, std::size_t x)
{
    if (x >= g.Ns[dim]) throw std::out_of_range("site coordinate out of range");
    return g.L[dim] / static_cast<double>(g.Ns[dim]) * static_cast<double>(x);
}

double phase(const ModeGrid& g, const std::vector<int>& n, const std::vector<std::size_t>& x,
             const std::vector<std::size_t>& y)
{
    if (x.size() != g.Ns.size() || y.size() != g.Ns.size()) throw dimension_error("site has wrong number of coordinates");
    const auto k = g.momentum(n);
    double s = 0;
    for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * (site_coord(g, i, x[i]) - site_coord(g, i, y[i]));
    return s;
}

} // namespace

cplx gaussian_pair_correlator(const GaussianWeight& w, std::size_t k, std::size_t l)
{
    w.validate();
    if (k >= w.lambda.size() || l >= w.lambda.size()) throw std::out_of_range("mode index out of range");
    if (k != l) return 0.0;
    return bose(w.lambda[k]);
}

cplx truncated_fock_pair_correlator(cplx lambda, unsigned n_max)
{
    cplx num = 0, den = 0;
    for (unsigned n = 0; n <= n_max; ++n) {
        const cplx w = std::exp(-lambda * static_cast<double>(n));
        num += static_cast<double>(n) * w;
        den += w;
    }
    return num / den;
}

cplx tau_mode_correlator(const ModeGrid& grid, double tau, double eps_i, std::size_t p, std::size_t k)
{
    if (!(tau > 0) || !(eps_i > 0)) throw std::invalid_argument("tau_mode_correlator: need tau > 0 and eps_i > 0");
    const auto modes = grid.modes();
    if (p >= modes.size() || k >= modes.size()) throw std::out_of_range("mode index out of range");
    if (p != k) return 0.0;
    return bose(action_exponent(modes[p].delta, tau, eps_i));
}

cplx two_time_contraction(const ModeGrid& grid, double tau, double eps_i, long t, long tp, const std::vector<int>& p)
{
    if (!(tau > 0) || !(eps_i > 0)) throw std::invalid_argument("two_time_contraction: need tau > 0 and eps_i > 0");
    const double E = grid.energy(p), eps = grid.eps();
    const double dt = eps * static_cast<double>(t - tp);
    cplx s = 0;
    for (int n0 : grid.time_indices()) {
        const double w = grid.frequency(n0);
        s += std::exp(cplx(0, -w * dt)) * bose_plus_one(action_exponent(w - E, tau, eps_i));
    }
    return s * (tau / grid.T);
}

cplx two_time_contraction_fine(const ModeGrid& grid, double eps_i, long t, long tp, const std::vector<int>& p)
{
    const long N = static_cast<long>(grid.Nt);
    const long j = ((t - tp) % N + N) % N;
    const cplx z(grid.energy(p), -eps_i);
    return std::exp(cplx(0, -1) * z * (grid.eps() * static_cast<double>(j))) / (1.0 - std::exp(cplx(0, -1) * z * grid.T));
}

cplx feynman_propagator_grid(const ModeGrid& grid, double tau, double eps_i, const SpacetimePoint& x,
                             const SpacetimePoint& y)
{
    if (!(tau > 0) || !(eps_i > 0)) throw std::invalid_argument("feynman_propagator_grid: need tau > 0 and eps_i > 0");
    const double V = static_cast<double>(grid.spatial_sites());
    const double dt = grid.eps() * static_cast<double>(x.t - y.t);
    cplx total = 0;
    for (const auto& n : grid.spatial_indices()) {
        const double E = grid.energy(n);
        if (E <= 0) throw std::domain_error("feynman_propagator_grid: zero-energy mode");
        const double kx = phase(grid, n, x.x, y.x);
        cplx fwd = 0, bwd = 0;
        for (int n0 : grid.time_indices()) {
            const double w = grid.frequency(n0);
            const cplx lam = action_exponent(w - E, tau, eps_i);
            fwd += std::exp(cplx(0, -w * dt)) * bose_plus_one(lam); // a(x) a^dag(y)
            bwd += std::exp(cplx(0, w * dt)) * bose(lam);           // a^dag(x) a(y)
        }
        total += (tau / grid.T) / (2 * E * V) * (fwd * std::exp(cplx(0, kx)) + bwd * std::exp(cplx(0, -kx)));
    }
    return total;
}

FreeFieldOracle::FreeFieldOracle(const ModeGrid& grid, unsigned n_site)
    : grid_(grid), V_(grid.spatial_sites()), n_site_(n_site), eps_(grid.eps())
{
    // site list, row-major over spatial dimensions
    std::vector<std::vector<std::size_t>> sites{{}};
    for (std::size_t n : grid.Ns) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& b : sites)
            for (std::size_t i = 0; i < n; ++i) {
                auto v = b;
                v.push_back(i);
                next.push_back(std::move(v));
            }
        sites = std::move(next);
    }
    std::vector<double> K(V_ * V_);
    for (std::size_t a = 0; a < V_; ++a)
        for (std::size_t b = 0; b < V_; ++b) {
            cplx s = 0;
            for (const auto& n : grid.spatial_indices()) {
                const double E = grid.energy(n);
                s += E * E * std::exp(cplx(0, phase(grid, n, sites[a], sites[b])));
            }
            K[a * V_ + b] = s.real() / static_cast<double>(V_);
        }

    double total = std::pow(static_cast<double>(n_site), static_cast<double>(V_));
    if (total > 4096) throw std::length_error("FreeFieldOracle: truncated space exceeds 4096 states");

    // per-site oscillator basis with frequency sqrt(K_xx)
    const std::size_t d = n_site;
    std::vector<Operator> phi(V_), pi(V_);
    for (std::size_t a = 0; a < V_; ++a) {
        const double w0 = std::sqrt(K[a * V_ + a]);
        Operator b(Dims{d});
        for (std::size_t n = 1; n < d; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
        const Operator bd = b.adjoint();
        const Operator ph = (b + bd) * cplx(1.0 / std::sqrt(2 * w0));
        const Operator pp = (bd - b) * cplx(0, std::sqrt(w0 / 2));
        Operator P = Operator::identity(1), Q = Operator::identity(1);
        for (std::size_t c = 0; c < V_; ++c) {
            P = kron(P, c == a ? ph : Operator::identity(d));
            Q = kron(Q, c == a ? pp : Operator::identity(d));
        }
        phi[a] = P.with_dims(Dims(V_, d));
        pi[a] = Q.with_dims(Dims(V_, d));
    }
    Operator H(Dims(V_, d));
    for (std::size_t a = 0; a < V_; ++a) {
        H += pi[a] * pi[a] * cplx(0.5);
        for (std::size_t b = 0; b < V_; ++b) H += phi[a] * phi[b] * cplx(0.5 * K[a * V_ + b]);
    }
    const Eigensystem es = hermitian_eigensystem(H);
    E0_ = es.values.front();
    const std::size_t D = H.dim();
    for (double e : es.values) gaps_.push_back(e - E0_);
    Ket g(Dims{D});
    for (std::size_t i = 0; i < D; ++i) g[i] = es.vectors(i, 0);
    phi_n0_.resize(V_);
    for (std::size_t a = 0; a < V_; ++a) {
        const Ket pg = phi[a] * g;
        phi_n0_[a].resize(D);
        for (std::size_t n = 0; n < D; ++n) {
            cplx s = 0;
            for (std::size_t i = 0; i < D; ++i) s += std::conj(es.vectors(i, n)) * pg[i];
            phi_n0_[a][n] = s;
        }
    }
}

cplx FreeFieldOracle::time_ordered(const SpacetimePoint& x, const SpacetimePoint& y) const
{
    auto flat = [&](const std::vector<std::size_t>& c) {
        if (c.size() != grid_.Ns.size()) throw dimension_error("site has wrong number of coordinates");
        std::size_t f = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] >= grid_.Ns[i]) throw std::out_of_range("site coordinate out of range");
            f = f * grid_.Ns[i] + c[i];
        }
        return f;
    };
    std::size_t later = flat(x.x), earlier = flat(y.x);
    double dt = eps_ * static_cast<double>(x.t - y.t);
    if (dt < 0) std::swap(later, earlier), dt = -dt;
    cplx s = 0;
    for (std::size_t n = 0; n < gaps_.size(); ++n)
        s += std::conj(phi_n0_[later][n]) * phi_n0_[earlier][n] * std::exp(cplx(0, -gaps_[n] * dt));
    return s;
}

} // namespace sqm
