#include "sqmlab/scm_constraints.hpp"

#include <cmath>
#include <numbers>

namespace sqm {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::vector<int> symmetric_range(std::size_t n)
{
    std::vector<int> v;
    const int lo = -static_cast<int>(n / 2);
    for (std::size_t i = 0; i < n; ++i) v.push_back(lo + static_cast<int>(i));
    return v;
}

} // namespace

ModeGrid::ModeGrid(double T_, std::size_t Nt_, std::vector<std::size_t> Ns_, std::vector<double> L_, double m)
    : T(T_), Nt(Nt_), Ns(std::move(Ns_)), L(std::move(L_)), mass(m)
{
    if (L.empty()) L.assign(Ns.size(), T);
    if (L.size() != Ns.size()) throw std::invalid_argument("ModeGrid: one length per spatial dimension");
    if (Nt < 1 || !(T > 0)) throw std::invalid_argument("ModeGrid: need T > 0 and Nt >= 1");
}

std::size_t ModeGrid::spatial_sites() const
{
    std::size_t v = 1;
    for (auto n : Ns) v *= n;
    return v;
}

std::vector<int> ModeGrid::time_indices() const { return symmetric_range(Nt); }

std::vector<std::vector<int>> ModeGrid::spatial_indices() const
{
    std::vector<std::vector<int>> out{{}};
    for (std::size_t n : Ns) {
        std::vector<std::vector<int>> next;
        for (const auto& base : out)
            for (int i : symmetric_range(n)) {
                auto v = base;
                v.push_back(i);
                next.push_back(std::move(v));
            }
        out = std::move(next);
    }
    return out;
}

std::vector<double> ModeGrid::momentum(const std::vector<int>& n) const
{
    std::vector<double> k(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) k[i] = two_pi * n[i] / L[i];
    return k;
}

double ModeGrid::energy(const std::vector<int>& n) const
{
    double s = mass * mass;
    for (double k : momentum(n)) s += k * k;
    return std::sqrt(s);
}

double ModeGrid::frequency(int n0) const { return two_pi * n0 / T; }

std::vector<ModeGrid::Mode> ModeGrid::modes() const
{
    std::vector<Mode> out;
    const auto sp = spatial_indices();
    for (int n0 : time_indices())
        for (const auto& n : sp) {
            const double w = frequency(n0), E = energy(n);
            out.push_back({n0, n, w, E, w - E});
        }
    return out;
}

LinearObservable LinearObservable::a(std::size_t n_modes, std::size_t i, cplx c)
{
    LinearObservable o(n_modes);
    o.alpha.at(i) = c;
    return o;
}

LinearObservable LinearObservable::a_star(std::size_t n_modes, std::size_t i, cplx c)
{
    LinearObservable o(n_modes);
    o.beta.at(i) = c;
    return o;
}

LinearObservable& LinearObservable::operator+=(const LinearObservable& o)
{
    if (o.size() != size()) throw dimension_error("LinearObservable: size mismatch");
    for (std::size_t i = 0; i < size(); ++i) alpha[i] += o.alpha[i], beta[i] += o.beta[i];
    return *this;
}

LinearObservable LinearObservable::operator*(cplx s) const
{
    LinearObservable r = *this;
    for (std::size_t i = 0; i < size(); ++i) r.alpha[i] *= s, r.beta[i] *= s;
    return r;
}

LinearObservable operator+(LinearObservable a, const LinearObservable& b) { return a += b; }

cplx poisson_bracket(const LinearObservable& f, const LinearObservable& g)
{
    if (f.size() != g.size()) throw dimension_error("poisson_bracket: size mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += cplx(0, -1) * f.alpha[i] * g.beta[i] + cplx(0, 1) * f.beta[i] * g.alpha[i];
    return s;
}

ConstraintSet build_constraints(const ModeGrid& grid)
{
    ConstraintSet cs;
    cs.modes = grid.modes();
    const std::size_t K = cs.modes.size();
    for (std::size_t i = 0; i < K; ++i) {
        const double d = cs.modes[i].delta;
        cs.phi.push_back(LinearObservable::a(K, i, d));
        cs.phi.push_back(LinearObservable::a_star(K, i, d));
    }
    cs.C = Operator(Dims{2 * K});
    for (std::size_t A = 0; A < 2 * K; ++A)
        for (std::size_t B = 0; B < 2 * K; ++B) {
            // C is block diagonal; skip brackets between different modes
            if (A / 2 != B / 2) continue;
            cs.C(A, B) = poisson_bracket(cs.phi[A], cs.phi[B]);
        }
    return cs;
}

ConstraintSet empty_constraints()
{
    ConstraintSet cs;
    cs.C = Operator(Dims{0});
    return cs;
}

const char* to_string(ConstraintClass c)
{
    switch (c) {
    case ConstraintClass::first_class: return "first-class";
    case ConstraintClass::second_class: return "second-class";
    case ConstraintClass::identically_zero: return "identically-zero";
    }
    return "?";
}

std::vector<ModeClassification> classify(const ConstraintSet& cs)
{
    std::vector<ModeClassification> out;
    for (std::size_t i = 0; i < cs.modes.size(); ++i) {
        const double d = cs.modes[i].delta;
        ModeClassification m{i, ConstraintClass::second_class, d, {}};
        // the mode block is invertible iff it has nonzero determinant (Delta^4)
        const cplx det = cs.C(2 * i, 2 * i) * cs.C(2 * i + 1, 2 * i + 1) - cs.C(2 * i, 2 * i + 1) * cs.C(2 * i + 1, 2 * i);
        if (std::abs(d) <= cs.tol) {
            m.kind = ConstraintClass::identically_zero;
            if (d != 0.0) m.note = "|Delta| below on-shell tolerance, treated as on-shell";
        } else if (det == cplx{}) {
            m.kind = ConstraintClass::first_class;
        } else if (std::abs(d) < cs.warn_band) {
            m.note = "near on-shell: C^-1 scales as Delta^-2";
        }
        out.push_back(std::move(m));
    }
    return out;
}

cplx dirac_bracket(const LinearObservable& f, const LinearObservable& g, const ConstraintSet& cs)
{
    cplx db = poisson_bracket(f, g);
    const auto cls = classify(cs);
    for (const auto& m : cls) {
        if (m.kind != ConstraintClass::second_class) continue;
        const std::size_t i = m.mode;
        Operator block(2, {cs.C(2 * i, 2 * i), cs.C(2 * i, 2 * i + 1), cs.C(2 * i + 1, 2 * i), cs.C(2 * i + 1, 2 * i + 1)});
        const Operator Cinv = inv(block); // throws on a singular block
        cplx fphi[2], phig[2];
        for (int a = 0; a < 2; ++a) {
            fphi[a] = poisson_bracket(f, cs.phi[2 * i + a]);
            phig[a] = poisson_bracket(cs.phi[2 * i + a], g);
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) db -= fphi[a] * Cinv(a, b) * phig[b];
    }
    return db;
}

namespace {

struct FieldPair {
    LinearObservable phi, pi;
};

std::vector<double> site_position(const ModeGrid& g, const std::vector<std::size_t>& x)
{
    if (x.size() != g.Ns.size()) throw dimension_error("site has wrong number of coordinates");
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= g.Ns[i]) throw std::out_of_range("site coordinate out of range");
        r[i] = g.L[i] / static_cast<double>(g.Ns[i]) * static_cast<double>(x[i]);
    }
    return r;
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

FieldPair fields(const ModeGrid& g, const std::vector<ModeGrid::Mode>& modes, const std::vector<std::size_t>& x,
                 double t, double tp, const std::vector<std::size_t>& y)
{
    const std::size_t K = modes.size();
    const double V = static_cast<double>(g.spatial_sites());
    const auto xr = site_position(g, x), yr = site_position(g, y);
    FieldPair f{LinearObservable(K), LinearObservable(K)};
    for (const auto& n : g.spatial_indices()) {
        const double E = g.energy(n);
        if (E <= 0) throw std::domain_error("field expansion: zero-energy mode has no normalizable amplitude");
        std::size_t idx = K;
        for (std::size_t i = 0; i < K; ++i)
            if (modes[i].n == n && std::abs(modes[i].delta) <= 1e-12) idx = i;
        if (idx == K) throw std::invalid_argument("field expansion: spatial mode has no on-shell frequency on the grid");
        const auto k = g.momentum(n);
        const double norm = 1.0 / std::sqrt(2.0 * E * V);
        const cplx ex = std::exp(cplx(0, -E * t + dot(k, xr)));
        const cplx ey = std::exp(cplx(0, -E * tp + dot(k, yr)));
        f.phi.alpha[idx] += norm * ex;
        f.phi.beta[idx] += norm * std::conj(ex);
        f.pi.alpha[idx] += cplx(0, -E) * norm * ey;
        f.pi.beta[idx] += cplx(0, E) * norm * std::conj(ey);
    }
    return f;
}

} // namespace

cplx equal_time_bracket_reconstruction(const ModeGrid& grid, const std::vector<std::size_t>& x,
                                       const std::vector<std::size_t>& y, double t, double tp)
{
    const ConstraintSet cs = build_constraints(grid);
    const FieldPair f = fields(grid, cs.modes, x, t, tp, y);
    return dirac_bracket(f.phi, f.pi, cs);
}

cplx field_bracket_mode_sum(const ModeGrid& grid, const std::vector<std::size_t>& x,
                            const std::vector<std::size_t>& y, double t, double tp)
{
    const auto xr = site_position(grid, x), yr = site_position(grid, y);
    std::vector<double> dx(xr.size());
    for (std::size_t i = 0; i < xr.size(); ++i) dx[i] = xr[i] - yr[i];
    double s = 0;
    for (const auto& n : grid.spatial_indices()) s += std::cos(grid.energy(n) * (t - tp) - dot(grid.momentum(n), dx));
    return s / static_cast<double>(grid.spatial_sites());
}

std::vector<double> fourier_derivative(std::size_t N, double eps)
{
    const double T = eps * static_cast<double>(N);
    std::vector<double> D(N * N);
    for (int n : symmetric_range(N)) {
        if (N % 2 == 0 && n == -static_cast<int>(N / 2)) continue; // Nyquist
        const double w = two_pi * n / T;
        for (std::size_t t = 0; t < N; ++t)
            for (std::size_t s = 0; s < N; ++s) {
                const double ph = w * eps * (static_cast<double>(t) - static_cast<double>(s));
                // Re[(i w / N) e^{i ph}]; the imaginary parts cancel between +-n
                D[t * N + s] += -w * std::sin(ph) / static_cast<double>(N);
            }
    }
    return D;
}

namespace {

double poly(const std::vector<double>& c, double q)
{
    double s = 0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * q + c[k];
    return s;
}

double poly_deriv(const std::vector<double>& c, double q)
{
    double s = 0;
    for (std::size_t k = c.size(); k-- > 1;) s = s * q + static_cast<double>(k) * c[k];
    return s;
}

void check_traj(const ParticleAction& a, const Trajectory& tr)
{
    if (tr.q.size() != a.N || tr.p.size() != a.N) throw dimension_error("trajectory length differs from N");
}

} // namespace

double action_value(const ParticleAction& a, const Trajectory& tr)
{
    check_traj(a, tr);
    const auto D = fourier_derivative(a.N, a.eps);
    double S = 0;
    for (std::size_t t = 0; t < a.N; ++t) {
        double dq = 0;
        for (std::size_t s = 0; s < a.N; ++s) dq += D[t * a.N + s] * tr.q[s];
        S += a.eps * (tr.p[t] * dq - tr.p[t] * tr.p[t] / (2 * a.mass) - poly(a.V, tr.q[t]));
    }
    return S;
}

HamiltonResidual hamilton_constraint_residual(const ParticleAction& a, const Trajectory& tr)
{
    check_traj(a, tr);
    const auto D = fourier_derivative(a.N, a.eps);
    HamiltonResidual r{std::vector<double>(a.N), std::vector<double>(a.N), 0.0};
    for (std::size_t t = 0; t < a.N; ++t) {
        double dq = 0, dp = 0;
        for (std::size_t s = 0; s < a.N; ++s) dq += D[t * a.N + s] * tr.q[s], dp += D[t * a.N + s] * tr.p[s];
        r.q_eq[t] = dq - tr.p[t] / a.mass;
        r.p_eq[t] = dp + poly_deriv(a.V, tr.q[t]);
        r.max_abs = std::max({r.max_abs, std::abs(r.q_eq[t]), std::abs(r.p_eq[t])});
    }
    return r;
}

} // namespace sqm
