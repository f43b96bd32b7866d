#include "sqmlab/wick_perturb.hpp"

#include "sqmlab/extended_fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace sqm {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

void pairings_rec(std::vector<std::size_t>& rest, Pairing& cur, std::vector<Pairing>& out)
{
    if (rest.empty()) {
        out.push_back(cur);
        return;
    }
    const std::size_t a = rest.front();
    for (std::size_t k = 1; k < rest.size(); ++k) {
        const std::size_t b = rest[k];
        std::vector<std::size_t> next;
        next.reserve(rest.size() - 2);
        for (std::size_t i = 1; i < rest.size(); ++i)
            if (i != k) next.push_back(rest[i]);
        cur.emplace_back(a, b);
        pairings_rec(next, cur, out);
        cur.pop_back();
    }
}

cplx wick_rec(std::vector<std::size_t>& rest, const ContractionKernel& k)
{
    if (rest.empty()) return 1.0;
    const std::size_t a = rest.front();
    cplx s = 0;
    for (std::size_t j = 1; j < rest.size(); ++j) {
        const cplx v = k(a, rest[j]);
        std::vector<std::size_t> next;
        next.reserve(rest.size() - 2);
        for (std::size_t i = 1; i < rest.size(); ++i)
            if (i != j) next.push_back(rest[i]);
        if (v != cplx(0)) s += v * wick_rec(next, k);
    }
    return s;
}

struct UnionFind {
    std::vector<std::size_t> p;
    explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    std::size_t find(std::size_t a)
    {
        while (p[a] != a) a = p[a] = p[p[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) { p[find(a)] = find(b); }
};

// Gaussian weights of the free action on one extended mode.
cplx bose(cplx l)
{
    const cplx d = std::exp(l) - 1.0;
    if (std::abs(d) < 1e-300) throw std::domain_error("contraction at the pole exp(lambda) = 1");
    return 1.0 / d;
}
cplx bose_plus_one(cplx l)
{
    const cplx d = 1.0 - std::exp(-l);
    if (std::abs(d) < 1e-300) throw std::domain_error("contraction at the pole exp(lambda) = 1");
    return 1.0 / d;
}
cplx lam(double delta, double tau, double eps_i) { return cplx(0, -tau) * cplx(delta, eps_i); }

int wrap(int n, std::size_t N)
{
    const int Ni = static_cast<int>(N);
    const int lo = -Ni / 2;
    return ((n - lo) % Ni + Ni) % Ni + lo;
}

std::vector<int> wrap(const ModeGrid& g, std::vector<int> n)
{
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = wrap(n[i], g.Ns[i]);
    return n;
}

void check_mode(const ModeGrid& g, const ExternalMode& m)
{
    if (m.n.size() != g.Ns.size()) throw dimension_error("external mode has wrong number of spatial indices");
}

// plane-wave phase k.x - w t eps for an integer label at point (t, x)
double wave_phase(const ModeGrid& g, const ExternalMode& m, long t, const std::vector<std::size_t>& x)
{
    double s = -two_pi * m.n0 * static_cast<double>(t) / static_cast<double>(g.Nt);
    for (std::size_t i = 0; i < x.size(); ++i)
        s += two_pi * m.n[i] * static_cast<double>(x[i]) / static_cast<double>(g.Ns[i]);
    return s;
}

struct Leg {
    ExternalMode m;
    bool incoming; // a^dag(p) on the right of e^{iS}
    double E, w;
};

Leg make_leg(const ModeGrid& g, const ExternalMode& m, bool in)
{
    check_mode(g, m);
    const double E = g.energy(wrap(g, m.n));
    if (!(E > 0)) throw std::domain_error("external leg with zero energy");
    return {m, in, E, g.frequency(m.n0)};
}

// -i sqrt(2 E tau) (w - E + i eps_i)
cplx leg_prefactor(const Leg& l, double tau, double eps_i)
{
    return cplx(0, -1) * std::sqrt(2 * l.E * tau) * cplx(l.w - l.E, eps_i);
}

// <phi(z) X> with X = a^dag(p) or a(k), continuum-normalized X = sqrt(T V) a
cplx field_leg(const ModeGrid& g, const Leg& l, long t, const std::vector<std::size_t>& x, double tau, double eps_i)
{
    const double V = static_cast<double>(g.spatial_sites());
    const cplx c = lam(l.w - l.E, tau, eps_i);
    const double ph = wave_phase(g, l.m, t, x);
    const double amp = std::sqrt(g.T * V) / std::sqrt(2 * l.E * V * g.T);
    if (l.incoming) return amp * std::exp(cplx(0, ph)) * bose_plus_one(c);
    return amp * std::exp(cplx(0, -ph)) * bose(c);
}

// <X Y> between external legs in list order
cplx leg_leg(const ModeGrid& g, const Leg& a, const Leg& b, double tau, double eps_i)
{
    if (a.incoming == b.incoming) return 0.0;
    if (a.m.n0 != b.m.n0 || wrap(g, a.m.n) != wrap(g, b.m.n)) return 0.0;
    const cplx c = lam(a.w - a.E, tau, eps_i);
    const double TV = lattice_volume(g);
    // a^dag a -> n, a a^dag -> n + 1
    return TV * (a.incoming ? bose(c) : bose_plus_one(c));
}

// <phi(t,x) phi(0,0)>_tau on every grid point, from the mode sums of the free action.
class PropagatorTable {
public:
    PropagatorTable(const ModeGrid& g, double tau, double eps_i) : g_(g), V_(g.spatial_sites())
    {
        const std::size_t N = g.Nt;
        const auto sp = g.spatial_indices();
        const auto n0s = g.time_indices();
        table_.assign(N * V_, 0.0);
        std::vector<cplx> fwd(N), bwd(N);
        for (const auto& n : sp) {
            const double E = g.energy(n);
            if (!(E > 0)) throw std::domain_error("propagator: zero-energy mode");
            std::vector<cplx> bp(n0s.size()), bm(n0s.size());
            for (std::size_t i = 0; i < n0s.size(); ++i) {
                const cplx c = lam(g.frequency(n0s[i]) - E, tau, eps_i);
                bp[i] = bose_plus_one(c);
                bm[i] = bose(c);
            }
            for (std::size_t j = 0; j < N; ++j) {
                cplx f = 0, b = 0;
                for (std::size_t i = 0; i < n0s.size(); ++i) {
                    const double ph = two_pi * n0s[i] * static_cast<double>(j) / static_cast<double>(N);
                    const cplx e(std::cos(ph), std::sin(ph));
                    f += std::conj(e) * bp[i];
                    b += e * bm[i];
                }
                fwd[j] = f, bwd[j] = b;
            }
            const double pre = (tau / g.T) / (2 * E * static_cast<double>(V_)) / tau;
            for (std::size_t s = 0; s < V_; ++s) {
                const auto x = site(s);
                double kx = 0;
                for (std::size_t d = 0; d < x.size(); ++d)
                    kx += two_pi * n[d] * static_cast<double>(x[d]) / static_cast<double>(g.Ns[d]);
                const cplx e(std::cos(kx), std::sin(kx));
                for (std::size_t j = 0; j < N; ++j) table_[j * V_ + s] += pre * (fwd[j] * e + bwd[j] * std::conj(e));
            }
        }
    }

    std::vector<std::size_t> site(std::size_t s) const
    {
        std::vector<std::size_t> x(g_.Ns.size());
        for (std::size_t d = x.size(); d-- > 0;) {
            x[d] = s % g_.Ns[d];
            s /= g_.Ns[d];
        }
        return x;
    }
    std::size_t sites() const { return V_; }
    // <phi(j, s) phi(0, 0)>
    cplx operator()(std::size_t j, std::size_t s) const { return table_[j * V_ + s]; }

private:
    const ModeGrid& g_;
    std::size_t V_;
    std::vector<cplx> table_;
};

void check_distinct(const ModeGrid& g, const std::vector<const ExternalMode*>& ms)
{
    for (std::size_t i = 0; i < ms.size(); ++i)
        for (std::size_t j = i + 1; j < ms.size(); ++j)
            if (wrap(g, ms[i]->n) == wrap(g, ms[j]->n))
                throw std::invalid_argument("scattering needs pairwise distinct external momenta");
}

cplx first_order_at(const ModeGrid& g, double lambda, const std::vector<Leg>& legs, double tau, double eps_i)
{
    // phi(z) x4, then a^dag(p1) a^dag(p2) a(k1) a(k2)
    InsertionList ins(8);
    for (std::size_t i = 0; i < 4; ++i) ins[i] = {FieldKind::field, 0};
    for (std::size_t i = 0; i < 4; ++i)
        ins[4 + i] = {legs[i].incoming ? FieldKind::create : FieldKind::annihilate, static_cast<int>(1 + i)};

    int q0 = 0;
    std::vector<int> q(g.Ns.size(), 0);
    for (const Leg& l : legs) {
        const int s = l.incoming ? 1 : -1;
        q0 += s * l.m.n0;
        for (std::size_t d = 0; d < q.size(); ++d) q[d] += s * l.m.n[d];
    }
    const double vs = vertex_sum(g, q0, q);
    if (vs == 0.0) return 0.0;

    // kernel at z = 0; the z dependence e^{-i Q z} is carried by vertex_sum
    const std::vector<std::size_t> x0(g.Ns.size(), 0);
    ContractionKernel K(8);
    cplx tad = 0;
    for (const auto& n : g.spatial_indices()) {
        const double E = g.energy(n);
        if (!(E > 0)) throw std::domain_error("tadpole: zero-energy mode");
        for (int n0 : g.time_indices()) {
            const cplx c = lam(g.frequency(n0) - E, tau, eps_i);
            tad += (bose_plus_one(c) + bose(c)) / (2 * E * static_cast<double>(g.spatial_sites()) * g.T);
        }
    }
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) K.set(i, j, tad);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t e = 0; e < 4; ++e) K.set(i, 4 + e, field_leg(g, legs[e], 0, x0, tau, eps_i));
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) K.set(4 + a, 4 + b, leg_leg(g, legs[a], legs[b], tau, eps_i));

    const auto conn = connected_filter(enumerate_pairings(8), ins, Connectivity::full);
    cplx pref = cplx(0, -1) * tau * tau * lambda / 24.0;
    for (const Leg& l : legs) pref *= leg_prefactor(l, tau, eps_i);
    return pref * vs * wick_sum(conn, K);
}

std::vector<Leg> legs_2to2(const ModeGrid& g, const ExternalMode& p1, const ExternalMode& p2, const ExternalMode& k1,
                           const ExternalMode& k2)
{
    check_distinct(g, {&p1, &p2, &k1, &k2});
    return {make_leg(g, p1, true), make_leg(g, p2, true), make_leg(g, k1, false), make_leg(g, k2, false)};
}

} // namespace

std::vector<Pairing> enumerate_pairings(std::size_t n)
{
    if (n % 2) throw std::invalid_argument("enumerate_pairings: odd number of insertions");
    std::vector<std::size_t> rest(n);
    std::iota(rest.begin(), rest.end(), 0);
    std::vector<Pairing> out;
    out.reserve(double_factorial(n == 0 ? 0 : n - 1));
    Pairing cur;
    pairings_rec(rest, cur, out);
    return out;
}

std::size_t double_factorial(std::size_t n)
{
    std::size_t r = 1;
    for (std::size_t k = n; k > 1; k -= 2) r *= k;
    return r;
}

ContractionKernel::ContractionKernel(std::size_t n) : n_(n), v_(n * n), set_(n * n, 0) {}

void ContractionKernel::set(std::size_t i, std::size_t j, cplx v)
{
    if (i >= n_ || j >= n_ || i >= j) throw std::out_of_range("kernel entries are (i, j) with i < j < size");
    v_[i * n_ + j] = v;
    set_[i * n_ + j] = 1;
}

bool ContractionKernel::has(std::size_t i, std::size_t j) const { return i < j && j < n_ && set_[i * n_ + j]; }

cplx ContractionKernel::operator()(std::size_t i, std::size_t j) const
{
    if (!has(i, j)) throw std::out_of_range("contraction kernel has no entry for this pair");
    return v_[i * n_ + j];
}

cplx wick_evaluate(const InsertionList& ins, const ContractionKernel& kernel)
{
    if (ins.size() != kernel.size()) throw dimension_error("kernel size differs from insertion count");
    if (ins.size() % 2) return 0.0;
    for (std::size_t i = 0; i < ins.size(); ++i)
        for (std::size_t j = i + 1; j < ins.size(); ++j)
            if (!kernel.has(i, j)) throw std::out_of_range("contraction kernel has no entry for this pair");
    std::vector<std::size_t> rest(ins.size());
    std::iota(rest.begin(), rest.end(), 0);
    return wick_rec(rest, kernel);
}

cplx pairing_value(const Pairing& p, const ContractionKernel& kernel)
{
    cplx v = 1.0;
    for (const auto& [i, j] : p) v *= kernel(i, j);
    return v;
}

cplx wick_sum(const std::vector<Pairing>& pairings, const ContractionKernel& kernel)
{
    cplx s = 0;
    for (const auto& p : pairings) s += pairing_value(p, kernel);
    return s;
}

std::vector<Pairing> connected_filter(const std::vector<Pairing>& pairings, const InsertionList& ins,
                                      Connectivity mode)
{
    std::map<int, std::size_t> gid;
    std::map<int, std::size_t> members;
    for (const auto& x : ins) {
        gid.emplace(x.group, gid.size());
        ++members[x.group];
    }
    std::vector<char> external(gid.size(), 0);
    bool any_vertex = false;
    for (const auto& [g, c] : members) {
        external[gid[g]] = c == 1;
        any_vertex |= c > 1;
    }
    if (mode == Connectivity::full && !any_vertex) return pairings;

    std::vector<Pairing> out;
    for (const auto& p : pairings) {
        UnionFind uf(gid.size());
        for (const auto& [i, j] : p) uf.unite(gid[ins.at(i).group], gid[ins.at(j).group]);
        bool keep = true;
        if (mode == Connectivity::full) {
            for (std::size_t g = 1; g < gid.size(); ++g) keep &= uf.find(g) == uf.find(0);
        } else {
            std::vector<char> touched(gid.size(), 0);
            for (std::size_t g = 0; g < gid.size(); ++g)
                if (external[g]) touched[uf.find(g)] = 1;
            for (std::size_t g = 0; g < gid.size(); ++g) keep &= touched[uf.find(g)] != 0;
        }
        if (keep) out.push_back(p);
    }
    return out;
}

double lattice_volume(const ModeGrid& grid) { return grid.T * static_cast<double>(grid.spatial_sites()); }

double vertex_sum(const ModeGrid& grid, int q0, const std::vector<int>& q)
{
    if (q.size() != grid.Ns.size()) throw dimension_error("momentum label has wrong number of spatial indices");
    if (q0 % static_cast<int>(grid.Nt) != 0) return 0.0;
    for (std::size_t d = 0; d < q.size(); ++d)
        if (q[d] % static_cast<int>(grid.Ns[d]) != 0) return 0.0;
    return lattice_volume(grid);
}

cplx phi4_first_order_2to2_at(const ModeGrid& grid, double lambda, const ExternalMode& p1, const ExternalMode& p2,
                              const ExternalMode& k1, const ExternalMode& k2, double tau, double eps_i)
{
    if (!(tau > 0) || !(eps_i > 0)) throw std::invalid_argument("phi4_first_order_2to2: need tau > 0 and eps_i > 0");
    return first_order_at(grid, lambda, legs_2to2(grid, p1, p2, k1, k2), tau, eps_i);
}

cplx extrapolate_to_zero(const std::vector<double>& tau, const std::vector<cplx>& value)
{
    if (tau.empty() || tau.size() != value.size()) throw std::invalid_argument("extrapolate_to_zero: bad sweep");
    std::vector<cplx> P = value;
    const std::size_t n = tau.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            P[i] = (tau[i + m] * P[i] - tau[i] * P[i + 1]) / (tau[i + m] - tau[i]);
    return P[0];
}

TauSweep phi4_first_order_sweep(const ModeGrid& grid, double lambda, const ExternalMode& p1, const ExternalMode& p2,
                                const ExternalMode& k1, const ExternalMode& k2, const ScatteringOptions& opt)
{
    if (opt.levels < 1) throw std::invalid_argument("tau sweep needs at least one level");
    const auto legs = legs_2to2(grid, p1, p2, k1, k2);
    TauSweep s;
    double t = opt.tau0;
    for (std::size_t i = 0; i < opt.levels; ++i, t /= 2) {
        s.tau.push_back(t);
        s.value.push_back(first_order_at(grid, lambda, legs, t, opt.eps_i));
    }
    s.extrapolated = extrapolate_to_zero(s.tau, s.value);
    return s;
}

cplx phi4_first_order_2to2(const ModeGrid& grid, double lambda, const ExternalMode& p1, const ExternalMode& p2,
                           const ExternalMode& k1, const ExternalMode& k2, const ScatteringOptions& opt)
{
    return phi4_first_order_sweep(grid, lambda, p1, p2, k1, k2, opt).extrapolated;
}

int on_shell_index(const ModeGrid& grid, const std::vector<int>& n, double tol)
{
    const double x = grid.energy(wrap(grid, n)) * grid.T / two_pi;
    const int n0 = static_cast<int>(std::lround(x));
    if (std::abs(x - n0) > tol) throw std::invalid_argument("external energy is not on the frequency grid");
    const auto idx = grid.time_indices();
    if (n0 < idx.front() || n0 > idx.back()) throw std::out_of_range("on-shell frequency outside the time grid");
    return n0;
}

namespace {

cplx s_channel_grid(const ModeGrid& g, double lambda, const std::vector<Leg>& legs, double eps_i)
{
    const double tau = g.eps();
    const PropagatorTable D(g, tau, eps_i);
    const std::size_t V = D.sites(), N = g.Nt;

    // phi(z) x4, phi(w) x4, a^dag(p1) a^dag(p2) a(k1) a(k2)
    InsertionList ins(12);
    for (std::size_t i = 0; i < 4; ++i) ins[i] = {FieldKind::field, 0}, ins[4 + i] = {FieldKind::field, 1};
    for (std::size_t i = 0; i < 4; ++i)
        ins[8 + i] = {legs[i].incoming ? FieldKind::create : FieldKind::annihilate, static_cast<int>(2 + i)};

    auto host = [](const Pairing& p, std::size_t ext) {
        for (const auto& [i, j] : p)
            if (j == ext) return i < 8 ? static_cast<int>(i / 4) : -1;
        return -1;
    };
    std::vector<Pairing> chan;
    for (const auto& p : connected_filter(enumerate_pairings(12), ins, Connectivity::full)) {
        const int a = host(p, 8), b = host(p, 9), c = host(p, 10), d = host(p, 11);
        if (a >= 0 && a == b && c >= 0 && c == d && a != c) chan.push_back(p);
    }

    int q0 = 0;
    std::vector<int> q(g.Ns.size(), 0);
    for (const Leg& l : legs) {
        const int s = l.incoming ? 1 : -1;
        q0 += s * l.m.n0;
        for (std::size_t d = 0; d < q.size(); ++d) q[d] += s * l.m.n[d];
    }
    const double vs = vertex_sum(g, q0, q);
    if (vs == 0.0) return 0.0;

    const std::vector<std::size_t> x0(g.Ns.size(), 0);
    std::vector<cplx> at_w(4);
    for (std::size_t e = 0; e < 4; ++e) at_w[e] = field_leg(g, legs[e], 0, x0, tau, eps_i);

    cplx loop = 0;
    ContractionKernel K(12);
    const cplx d0 = D(0, 0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) K.set(i, j, d0), K.set(4 + i, 4 + j, d0);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) K.set(8 + a, 8 + b, leg_leg(g, legs[a], legs[b], tau, eps_i));
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t s = 0; s < V; ++s) {
            // z = (j, s), w = 0; <phi(z) phi(w)> with z on the left
            const cplx zw = D(j, s);
            const auto x = D.site(s);
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t k = 0; k < 4; ++k) K.set(i, 4 + k, zw);
            for (std::size_t e = 0; e < 4; ++e) {
                const cplx fz = field_leg(g, legs[e], static_cast<long>(j), x, tau, eps_i);
                for (std::size_t i = 0; i < 4; ++i) K.set(i, 8 + e, fz), K.set(4 + i, 8 + e, at_w[e]);
            }
            loop += g.eps() * wick_sum(chan, K);
        }
    const cplx v = cplx(0, -1) * tau * tau * lambda / 24.0;
    cplx pref = v * v / 2.0;
    for (const Leg& l : legs) pref *= leg_prefactor(l, tau, eps_i);
    return pref * vs * loop;
}

std::vector<Leg> on_shell_legs(const ModeGrid& grid, const std::vector<std::vector<int>>& in,
                               const std::vector<std::vector<int>>& out, std::vector<ExternalMode>& store)
{
    if (in.size() != 2 || out.size() != 2) throw std::invalid_argument("only 2 -> 2 processes are built");
    store.clear();
    for (const auto& n : in) store.push_back({on_shell_index(grid, n), n});
    for (const auto& n : out) store.push_back({on_shell_index(grid, n), n});
    return legs_2to2(grid, store[0], store[1], store[2], store[3]);
}

} // namespace

cplx smatrix_element(const ModeGrid& grid, const std::vector<std::vector<int>>& in,
                     const std::vector<std::vector<int>>& out, double lambda, int order, const ScatteringOptions& opt)
{
    if (order != 1 && order != 2) throw std::invalid_argument("smatrix_element: supported orders are 1 and 2");
    std::vector<ExternalMode> m;
    const auto legs = on_shell_legs(grid, in, out, m);
    if (order == 1) return phi4_first_order_2to2(grid, lambda, m[0], m[1], m[2], m[3], opt);
    return s_channel_grid(grid, lambda, legs, opt.eps_i);
}

cplx first_order_dyson_oracle(const ModeGrid& grid, double lambda, const std::vector<std::vector<int>>& in,
                              const std::vector<std::vector<int>>& out, std::size_t quad_points)
{
    std::vector<ExternalMode> m;
    const auto legs = on_shell_legs(grid, in, out, m);
    const std::size_t V = grid.spatial_sites();
    std::vector<double> E;
    for (const Leg& l : legs) E.push_back(l.E);
    const LatticeFock lf = LatticeFock::make(1, E, 2, grid.eps());
    std::vector<Operator> a, ad;
    for (std::size_t i = 0; i < 4; ++i) {
        a.push_back(ladder(lf, 0, i, Ladder::annihilate));
        ad.push_back(ladder(lf, 0, i, Ladder::create));
    }
    const Dims dims = a[0].dims();
    Operator Hint(dims);
    // site list, row-major
    for (std::size_t s = 0; s < V; ++s) {
        std::vector<std::size_t> x(grid.Ns.size());
        std::size_t r = s;
        for (std::size_t d = x.size(); d-- > 0;) x[d] = r % grid.Ns[d], r /= grid.Ns[d];
        Operator phi(dims);
        for (std::size_t i = 0; i < 4; ++i) {
            double kx = 0;
            for (std::size_t d = 0; d < x.size(); ++d)
                kx += two_pi * legs[i].m.n[d] * static_cast<double>(x[d]) / static_cast<double>(grid.Ns[d]);
            const double amp = 1.0 / std::sqrt(2 * E[i] * static_cast<double>(V));
            phi += a[i] * (amp * std::exp(cplx(0, kx))) + ad[i] * (amp * std::exp(cplx(0, -kx)));
        }
        const Operator p2 = phi * phi;
        Hint += p2 * p2 * cplx(lambda / 24.0);
    }
    Operator H0(dims);
    for (std::size_t i = 0; i < 4; ++i) H0 += ad[i] * a[i] * cplx(E[i]);

    const Ket vac = vacuum(lf);
    const Ket ini = ad[0] * (ad[1] * vac);
    const Ket fin = ad[2] * (ad[3] * vac);

    // composite Simpson on [0, T]
    const std::size_t n = quad_points + quad_points % 2;
    const double h = grid.T / static_cast<double>(n);
    cplx s = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = h * static_cast<double>(k);
        const Operator U = expm(H0 * cplx(0, -t));
        const cplx f = inner(U * fin, Hint * (U * ini));
        const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
        s += w * f;
    }
    s *= h / 3;
    cplx norm = 1.0;
    for (double e : E) norm *= std::sqrt(2 * e * static_cast<double>(V));
    return cplx(0, -1) * s * norm;
}

cplx s_channel_dyson_oracle(const ModeGrid& grid, double lambda, const std::vector<std::vector<int>>& in,
                            const std::vector<std::vector<int>>& out, double eps_i)
{
    std::vector<ExternalMode> m;
    const auto legs = on_shell_legs(grid, in, out, m);
    int q0 = 0;
    std::vector<int> P(grid.Ns.size(), 0), Q(grid.Ns.size(), 0);
    for (const Leg& l : legs) {
        const int s = l.incoming ? 1 : -1;
        q0 += s * l.m.n0;
        for (std::size_t d = 0; d < P.size(); ++d) {
            Q[d] += s * l.m.n[d];
            if (l.incoming) P[d] += l.m.n[d];
        }
    }
    const double vs = vertex_sum(grid, q0, Q);
    if (vs == 0.0) return 0.0;
    const double P0 = legs[0].E + legs[1].E;
    const double V = static_cast<double>(grid.spatial_sites());
    // intermediate pair |q, P - q>: forward ordering i/(P0 - S + i eta), backward -i/(P0 + S - i eta),
    // eta = 2 eps_i from the two damped propagators
    cplx sum = 0;
    for (const auto& q : grid.spatial_indices()) {
        std::vector<int> qp(q.size());
        for (std::size_t d = 0; d < q.size(); ++d) qp[d] = P[d] - q[d];
        const double E1 = grid.energy(q), E2 = grid.energy(wrap(grid, qp));
        const double S = E1 + E2;
        const cplx fw = cplx(0, 1) / cplx(P0 - S, 2 * eps_i);
        const cplx bw = cplx(0, -1) / cplx(P0 + S, -2 * eps_i);
        sum += (fw + bw) / (4 * E1 * E2 * V);
    }
    return vs * (-lambda * lambda / 2) * sum;
}

} // namespace sqm
