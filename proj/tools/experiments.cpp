#include "experiments.hpp"

#include "sqmlab/extended_fock.hpp"
#include "sqmlab/fermion_sector.hpp"
#include "sqmlab/gaussian.hpp"
#include "sqmlab/quantum_time.hpp"
#include "sqmlab/random.hpp"
#include "sqmlab/scm_constraints.hpp"
#include "sqmlab/spacetime_state.hpp"
#include "sqmlab/timeslab.hpp"
#include "sqmlab/wick_perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace sqm::cli {

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || trim(v.substr(pos)) != "" || !std::isfinite(x))
        throw ConfigError("setting '" + key + "': not a number: '" + v + "'");
    return x;
}

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string idx(std::size_t i, int width = 3)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, i);
    return buf;
}

std::string num17(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json cj(cplx z) { return json::array({z.real(), z.imag()}); }

void need(bool ok, const std::string& msg)
{
    if (!ok) throw ConfigError(msg);
}

std::size_t count(const Config& c, const std::string& key, long def, long lo, long hi)
{
    const long v = c.integer(key, def);
    need(v >= lo && v <= hi, "parameter out of cap: " + key + " = " + std::to_string(v) + " (allowed " +
                                 std::to_string(lo) + ".." + std::to_string(hi) + ")");
    return static_cast<std::size_t>(v);
}

double positive(const Config& c, const std::string& key, double def)
{
    const double v = c.num(key, def);
    need(v > 0, "parameter must be positive: " + key);
    return v;
}

std::size_t checked_pow(std::size_t d, std::size_t N, std::size_t cap)
{
    std::size_t r = 1;
    for (std::size_t i = 0; i < N; ++i) {
        r *= d;
        need(r <= cap, "parameter out of cap: dimension d^N exceeds cap = " + std::to_string(cap));
    }
    return r;
}

class Cases {
public:
    explicit Cases(const Config& c) : cfg_(c) {}
    Case& add(std::string key, cplx value, cplx oracle, Metric m, const std::string& tol, json inputs = json::object())
    {
        Case k;
        k.key = std::move(key);
        k.inputs = std::move(inputs);
        k.value = value;
        k.oracle = oracle;
        k.metric = m;
        k.tol_name = tol;
        k.tol = cfg_.tol(tol);
        out.push_back(std::move(k));
        return out.back();
    }
    std::vector<Case> out;

private:
    const Config& cfg_;
};

// first k entries of a seeded permutation of 0..n-1
std::vector<std::size_t> pick_slots(Rng& rng, std::size_t n, std::size_t k)
{
    std::vector<std::size_t> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(s[i], s[i + rng.index(n - i)]);
    s.resize(k);
    return s;
}

Ket apply_steps(const Operator& U, const Ket& psi, std::size_t t)
{
    Ket x = psi;
    for (std::size_t i = 0; i < t; ++i) x = U * x;
    return x;
}

// ---------------------------------------------------------------------------

void paw_conditioning(const Config& c, Cases& out)
{
    const std::size_t cap = count(c, "cap", 4096, 1, 1 << 14);
    const std::size_t d = count(c, "d", 2, 1, 64), N = count(c, "N", 6, 1, 512);
    need(d * N <= cap, "parameter out of cap: clock x system dimension exceeds cap");
    const double eps = positive(c, "eps", 0.3);
    const std::size_t n = count(c, "cases", 50, 1, 10000);
    Rng rng(c.seed());
    for (std::size_t i = 0; i < n; ++i) {
        ClockSystem cs{N, eps, rng.hermitian(d), rng.ket(d), false};
        const Operator O = rng.hermitian(d);
        const std::size_t t = rng.index(N);
        const cplx v = conditioned_expectation(cs, O, t);
        const cplx o = expect(apply_steps(cs.U(), cs.psi0, t), O);
        out.add("case-" + idx(i), v, o, Metric::absolute, "conditioning", {{"t", t}});
    }
}

void trace_theorem(const Config& c, Cases& out)
{
    const std::size_t cap = count(c, "cap", 4096, 1, 1 << 14);
    const std::vector<double> ds = c.list("d", {2, 3});
    const std::size_t Nmax = count(c, "N", 5, 1, 12), kmax = count(c, "inserts", 3, 0, 12);
    const std::size_t n = count(c, "cases", 50, 1, 10000);
    for (double d : ds) {
        need(d >= 1 && d == std::floor(d), "d entries must be positive integers");
        checked_pow(static_cast<std::size_t>(d), Nmax, cap);
    }
    Rng rng(c.seed());
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = static_cast<std::size_t>(ds[rng.index(ds.size())]);
        const std::size_t N = 1 + rng.index(Nmax);
        const double eps = rng.uniform(0.1, 1.0);
        const QuantumAction qa = build_action(SliceLayout(d, N, eps, cap), rng.hermitian(d));
        const std::size_t k = rng.index(std::min(kmax, N) + 1);
        std::vector<Insert> ins;
        json slices = json::array();
        for (std::size_t s : pick_slots(rng, N, k)) ins.push_back({rng.ginibre(d), s}), slices.push_back(s);
        out.add("case-" + idx(i), trace_theorem_lhs(qa, ins), trace_theorem_rhs(qa, ins), Metric::scaled,
                "trace_theorem", {{"d", d}, {"N", N}, {"eps", eps}, {"slices", slices}});
    }
}

void constraint_theorem(const Config& c, Cases& out)
{
    const std::size_t cap = count(c, "cap", 4096, 1, 1 << 14);
    const std::vector<double> ds = c.list("d", {2, 3});
    const std::size_t Nmax = count(c, "N", 5, 2, 12);
    const std::size_t n = count(c, "cases", 50, 1, 10000);
    for (double d : ds) {
        need(d >= 1 && d == std::floor(d), "d entries must be positive integers");
        checked_pow(static_cast<std::size_t>(d), Nmax, cap);
    }
    Rng rng(c.seed());
    for (std::size_t i = 0; i < n; ++i) {
        const bool boundary = i % 2 == 1;
        const auto d = static_cast<std::size_t>(ds[rng.index(ds.size())]);
        const std::size_t N = boundary ? 2 + rng.index(Nmax - 1) : 1 + rng.index(Nmax);
        const double eps = rng.uniform(0.1, 1.0);
        const QuantumAction qa = build_action(SliceLayout(d, N, eps, cap), rng.hermitian(d));
        const std::size_t t = rng.index(boundary ? N - 1 : N);
        const Operator O = rng.ginibre(d);
        std::optional<Boundary> b;
        if (boundary) b = Boundary{rng.ket(d), rng.ket(d)};
        out.add("case-" + idx(i), constraint_expectation(qa, O, t, b), 0.0, Metric::absolute, "constraint",
                {{"d", d}, {"N", N}, {"t", t}, {"boundary", boundary}});
    }
}

std::pair<Ket, Operator> random_system(Rng& rng, std::size_t d) { return {rng.ket(d), rng.hermitian(d)}; }

void st_state_marginals(const Config& c, Cases& out)
{
    const std::size_t cap = count(c, "cap", 4096, 1, 1 << 14);
    const std::vector<double> sl = c.list("sites", {2, 2});
    Dims sites;
    for (double s : sl) {
        need(s >= 2 && s == std::floor(s), "sites entries must be integers >= 2");
        sites.push_back(static_cast<std::size_t>(s));
    }
    const std::size_t d = product(sites), N = count(c, "N", 2, 1, 12);
    checked_pow(d, N, cap);
    const std::size_t n = count(c, "systems", 10, 1, 1000);
    const double eps = positive(c, "eps", 0.4);
    Rng rng(c.seed());
    for (std::size_t s = 0; s < n; ++s) {
        const auto [psi, H] = random_system(rng, d);
        const SpacetimeState st = build_R(psi, H, eps, N, sites);
        const Operator U = expm(H * cplx(0, -eps));
        const std::string sys = "system-" + idx(s) + "/";
        for (std::size_t t = 0; t < N; ++t) {
            const Ket pt = apply_steps(U, psi, t);
            out.add(sys + "marginal-" + idx(t, 2), max_abs_diff(marginal(st, t), outer(pt, pt)), 0.0,
                    Metric::absolute, "marginal", {{"slice", t}});
            std::vector<std::pair<std::string, std::set<std::pair<std::size_t, std::size_t>>>> regions;
            std::set<std::pair<std::size_t, std::size_t>> whole;
            for (std::size_t x = 0; x < sites.size(); ++x) whole.insert({t, x});
            regions.push_back({"slice", whole});
            if (sites.size() > 1) regions.push_back({"site0", {{t, 0}}});
            for (const auto& [name, reg] : regions) {
                const RegionReport r = reduce_to_region(st, reg);
                const std::string k = sys + "region-" + idx(t, 2) + "-" + name + "/";
                const json in{{"slice", t}, {"region", name}, {"hermiticity_deviation", r.hermiticity_deviation}};
                out.add(k + "hermiticity", r.hermiticity_deviation, 0.0, Metric::absolute, "region", in);
                out.add(k + "trace", r.R.trace(), 1.0, Metric::absolute, "region", in);
                double bad = 0;
                for (const cplx& e : r.eigenvalues) bad = std::max({bad, -e.real(), std::abs(e.imag())});
                out.add(k + "psd", bad, 0.0, Metric::absolute, "region", in);
            }
        }
    }
}

void causality(const Config& c, Cases& out)
{
    const std::size_t cap = count(c, "cap", 4096, 1, 1 << 14);
    const std::size_t d = count(c, "d", 3, 1, 64), N = count(c, "N", 3, 2, 12);
    checked_pow(d, N, cap);
    const std::size_t n = count(c, "cases", 50, 1, 10000);
    Rng rng(c.seed());
    for (std::size_t i = 0; i < n; ++i) {
        const auto [psi, H] = random_system(rng, d);
        const double eps = rng.uniform(0.1, 1.0);
        const SpacetimeState st = build_R(psi, H, eps, N);
        const Operator A = rng.ginibre(d), B = rng.ginibre(d);
        const std::size_t t = 1 + rng.index(N - 1);
        const Operator Ut = mpow(expm(H * cplx(0, -eps)), static_cast<unsigned>(t));
        const Operator BH = Ut.adjoint() * B * Ut;
        out.add("case-" + idx(i), causality_witness(st, A, B, t), expect(psi, commutator(BH, A)), Metric::absolute,
                "causality", {{"t", t}, {"eps", eps}});
    }
}

void pseudo_entropy(const Config& c, Cases& out)
{
    const std::size_t cap = count(c, "cap", 4096, 1, 1 << 14);
    const std::size_t d = count(c, "d", 2, 1, 64), N = count(c, "N", 3, 1, 12);
    checked_pow(d, N, cap);
    const std::size_t n = count(c, "systems", 10, 1, 1000), kmax = count(c, "k_max", 6, 1, 32);
    Rng rng(c.seed());
    for (std::size_t s = 0; s < n; ++s) {
        const auto [psi, H] = random_system(rng, d);
        const double eps = rng.uniform(0.1, 1.0);
        const SpacetimeState st = build_R(psi, H, eps, N);
        for (unsigned k = 1; k <= kmax; ++k) {
            const PowerResult p = power_and_pseudoentropy(st, k);
            const std::string key = "system-" + idx(s) + "/k-" + idx(k, 2);
            out.add(key + "/trace", p.trace, 1.0, Metric::absolute, "power_trace", {{"k", k}, {"eps", eps}});
            if (k > 1)
                out.add(key + "/entropy", p.pseudo_entropy, 0.0, Metric::absolute, "power_trace", {{"k", k}});
        }
    }
}

void anomaly(const Config& c, Cases& out)
{
    const double T = positive(c, "T", 2 * pi);
    const std::vector<double> nl = c.list("N_list", {8, 16, 32});
    std::vector<std::size_t> Ns;
    for (double x : nl) {
        need(x >= 2 && x <= 128 && x == std::floor(x), "parameter out of cap: N_list entries must be integers in 2..128");
        Ns.push_back(static_cast<std::size_t>(x));
    }
    const auto pts = anomaly_scan(Ns, T);
    for (const auto& p : pts) {
        const std::string k = "scan/N-" + idx(p.N);
        out.add(k + "/mismatch", p.mismatch, p.N - 1.0, Metric::absolute, "anomaly_mismatch",
                {{"N", p.N}, {"extended", p.extended}, {"standard", p.standard}});
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1].N != 2 * pts[i].N) continue;
        out.add("scan/ratio-" + idx(pts[i + 1].N) + "-over-" + idx(pts[i].N), pts[i + 1].mismatch / pts[i].mismatch,
                anomaly_predicted_ratio(pts[i].N), Metric::relative, "anomaly_ratio", {{"N", pts[i].N}});
    }

    const double w = 2 * pi / T;
    Operator cm(Dims{3});
    cm(0, 0) = 0.4, cm(1, 1) = -1.1, cm(2, 2) = 0.7;
    cm(0, 2) = cplx(0.3, 0.2), cm(2, 0) = cplx(0.3, -0.2);
    cm(0, 1) = cplx(0.1, -0.5), cm(1, 0) = cplx(0.1, 0.5);
    for (double x : c.list("check_N", {4, 6})) {
        need(x >= 2 && x <= 12 && x == std::floor(x), "parameter out of cap: check_N entries must be integers in 2..12");
        const auto N = static_cast<std::size_t>(x);
        const LatticeFock lf = LatticeFock::make_sector(N, {w, 2 * w}, 2, 2, T / N);
        const LatticeFock lf3 = LatticeFock::make_sector(N, {w, 2 * w, 3 * w}, 2, 3, T / N);
        for (std::size_t t = 0; t < N; ++t) {
            const std::string k = "check/N-" + idx(N) + "/t-" + idx(t, 2);
            const json in{{"N", N}, {"t", t}};
            const auto [e, s] = naive_conditioning_check(lf, t, 1, true);
            out.add(k + "/normal-ordered", e, s, Metric::absolute, "normal_ordered", in);
            const auto [e2, s2] = multi_mode_check(lf3, {0, 2}, cm, t);
            out.add(k + "/multi-mode", e2, s2, Metric::absolute, "normal_ordered", in);
            out.add(k + "/internal-contraction", internal_contraction(lf, t, 0), static_cast<double>(N) / T,
                    Metric::absolute, "internal_contraction", in);
        }
    }
}

void dirac_nogo(const Config& c, Cases& out)
{
    const double T = positive(c, "T", 2 * pi), L = positive(c, "L", pi / 2);
    const std::size_t Nt = count(c, "Nt", 11, 1, 256), S = count(c, "sites", 2, 1, 64);
    need(Nt * S <= 512, "parameter out of cap: Nt x sites above 512 modes");
    const double m = c.num("mass", 3.0);
    need(m >= 0, "mass must be non-negative");
    const ModeGrid g(T, Nt, {S}, {L}, m);
    const ConstraintSet cs = build_constraints(g);
    const auto cl = classify(cs);
    const std::size_t K = cs.modes.size();
    for (std::size_t i = 0; i < K; ++i) {
        const auto& md = cs.modes[i];
        const bool on = std::abs(md.delta) <= cs.tol;
        const std::string k = "mode-" + idx(i) + "/";
        const json in{{"n0", md.n0}, {"n", md.n}, {"delta", md.delta}, {"class", to_string(cl[i].kind)},
                      {"note", cl[i].note}};
        const auto want = on ? ConstraintClass::identically_zero : ConstraintClass::second_class;
        out.add(k + "class", cl[i].kind == want ? 1.0 : 0.0, 1.0, Metric::absolute, "exact", in);
        const auto a = LinearObservable::a(K, i), s = LinearObservable::a_star(K, i);
        const cplx db = dirac_bracket(a, s, cs);
        if (on) {
            out.add(k + "db", db, cplx(0, -1), Metric::absolute, "exact", in);
            out.add(k + "pb", poisson_bracket(a, s), cplx(0, -1), Metric::absolute, "exact", in);
        } else {
            out.add(k + "db", db, 0.0, Metric::absolute, "dirac_bracket", in);
        }
    }
    const double t = c.num("t", 0.3);
    for (std::size_t x = 0; x < S; ++x)
        for (std::size_t y = 0; y < S; ++y)
            out.add("equal-time/x" + idx(x, 2) + "-y" + idx(y, 2), equal_time_bracket_reconstruction(g, {x}, {y}, t, t),
                    x == y ? 1.0 : 0.0, Metric::absolute, "bracket_delta", {{"x", x}, {"y", y}, {"t", t}});
}

void propagator(const Config& c, Cases& out)
{
    // analytic Gaussian pair correlator against the truncated Fock trace
    const std::size_t nmax = count(c, "n_max", 40, 1, 2000);
    std::size_t i = 0;
    for (double re : c.list("re_list", {0.5, 0.75, 1.0, 2.0, 3.0}))
        for (double im : c.list("im_list", {0.0, 0.7, -2.0, 3.1})) {
            need(re > 0, "re_list entries must be positive");
            const cplx l(re, im);
            out.add("pair/" + idx(i++, 2), gaussian_pair_correlator({{l}}, 0, 0), truncated_fock_pair_correlator(l, nmax),
                    Metric::absolute, "pair_correlator", {{"lambda", cj(l)}, {"n_max", nmax}});
        }

    // tau convergence of an off-shell mode correlator
    const ModeGrid og(2 * pi, 9, {}, {}, c.num("order_mass", 2.0));
    const double oei = positive(c, "order_eps_i", 0.3);
    const auto modes = og.modes();
    std::size_t off = modes.size();
    for (std::size_t j = 0; j < modes.size(); ++j)
        if (modes[j].n0 == 4) off = j;
    need(std::abs(modes[off].delta) > 1e-6, "order_mass puts the probe mode on shell");
    const cplx lim = cplx(0, 1) / cplx(modes[off].delta, oei);
    const std::vector<double> taus = c.list("tau_list", {0.04, 0.02, 0.01, 0.005});
    std::vector<double> err;
    for (double t : taus) {
        need(t > 0, "tau_list entries must be positive");
        const cplx v = t * tau_mode_correlator(og, t, oei, off, off);
        err.push_back(std::abs(v - lim));
        if (c.flag("tau_sweep", false))
            out.add("sweep/tau-" + fmt("%.6f", t), v, lim, Metric::relative, "tau_sweep", {{"tau", t}});
    }
    for (std::size_t j = 0; j + 1 < taus.size(); ++j)
        out.add("order/tau-" + fmt("%.6f", taus[j + 1]), err[j + 1] / err[j], taus[j + 1] / taus[j], Metric::relative,
                "order_ratio", {{"tau", taus[j + 1]}, {"tau_prev", taus[j]}, {"delta", modes[off].delta}});

    // grid Feynman propagator against exact diagonalization
    const double eps = positive(c, "eps", 0.01), T = positive(c, "T", 400.0), ei = positive(c, "eps_i", 0.05);
    const double Nd = std::round(T / eps);
    need(Nd >= 1 && Nd <= 2e5, "parameter out of cap: T / eps above 200000 slices");
    const auto N = static_cast<std::size_t>(Nd);
    const std::size_t nsite = count(c, "n_site", 20, 4, 40);
    const ModeGrid one(T, N, {1}, {1.0}, c.num("mass", 1.3));
    const FreeFieldOracle o1(one, nsite);
    const SpacetimePoint p0{5, {0}};
    out.add("grid/one-site", feynman_propagator_grid(one, eps, ei, p0, p0), o1.time_ordered(p0, p0), Metric::relative,
            "propagator_grid", {{"dt", 0}, {"sites", 1}});
    const ModeGrid two(T, N, {2}, {2.0}, c.num("mass2", 1.0));
    const FreeFieldOracle o2(two, nsite);
    for (long dt : {-3L, 0L, 3L, 7L})
        for (std::size_t x : {0u, 1u}) {
            const SpacetimePoint a{10 + dt, {x}}, b{10, {0}};
            out.add("grid/two-site/dt" + std::string(dt < 0 ? "m" : "p") + idx(std::labs(dt), 2) + "-x" + idx(x, 1),
                    feynman_propagator_grid(two, eps, ei, a, b), o2.time_ordered(a, b), Metric::relative,
                    "propagator_grid", {{"dt", dt}, {"x", x}, {"sites", 2}});
        }
}

void smatrix(const Config& c, Cases& out)
{
    const std::string process = c.str("process", "2to2");
    need(process == "2to2", "unknown process '" + process + "' (only 2to2)");
    const long order = c.integer("order", 1);
    need(order == 1 || order == 2, "order must be 1 or 2");
    const double m = 1.0, E = std::sqrt(2.0);
    const std::size_t Nt = count(c, "Nt", order == 1 ? 8 : 512, 2, 4096);
    const std::size_t periods = count(c, "periods", order == 1 ? 1 : 6, 1, 64);
    const ModeGrid g(periods * 2 * pi / E, Nt, {3, 3}, {2 * pi, 2 * pi}, m);
    const double lam = c.num("lambda", order == 1 ? 0.7 : 0.5);
    ScatteringOptions opt;
    opt.eps_i = positive(c, "eps_i", order == 1 ? 0.1 : 0.3);
    opt.tau0 = positive(c, "tau", 0.02);
    opt.levels = count(c, "levels", 4, 2, 10);
    const std::vector<std::vector<int>> in{{1, 0}, {-1, 0}}, outm{{0, 1}, {0, -1}};
    const json legs{{"in", in}, {"out", outm}, {"lambda", lam}, {"eps_i", opt.eps_i}, {"Nt", Nt}, {"T", g.T}};

    for (std::size_t n = 1; n <= 5; ++n) {
        double want = 1;
        for (std::size_t k = 2 * n - 1; k > 1; k -= 2) want *= static_cast<double>(k);
        out.add("pairings/n-" + idx(n, 1), static_cast<double>(enumerate_pairings(2 * n).size()), want,
                Metric::absolute, "exact", {{"points", 2 * n}});
    }

    if (order == 2) {
        out.add("s-channel", smatrix_element(g, in, outm, lam, 2, opt), s_channel_dyson_oracle(g, lam, in, outm, opt.eps_i),
                Metric::relative, "smatrix_order2", legs);
        return;
    }
    const int n0 = on_shell_index(g, in[0]);
    const ExternalMode p1{n0, in[0]}, p2{n0, in[1]}, k1{n0, outm[0]}, k2{n0, outm[1]};
    const cplx target = cplx(0, -lam) * lattice_volume(g);
    const TauSweep sw = phi4_first_order_sweep(g, lam, p1, p2, k1, k2, opt);
    out.add("amplitude", sw.extrapolated, target, Metric::relative, "smatrix_limit", legs);
    out.add("dyson-oracle", sw.extrapolated, first_order_dyson_oracle(g, lam, in, outm), Metric::relative,
            "smatrix_oracle", legs);
    const ExternalMode k2v{n0, {1, 1}}, k1f{n0 + 1, outm[0]};
    out.add("violating/spatial", phi4_first_order_2to2_at(g, lam, p1, p2, k1, k2v, opt.tau0, opt.eps_i), 0.0,
            Metric::absolute, "exact", {{"k2", k2v.n}});
    out.add("violating/frequency", phi4_first_order_2to2_at(g, lam, p1, p2, k1f, k2, opt.tau0, opt.eps_i), 0.0,
            Metric::absolute, "exact", {{"k1_n0", k1f.n0}});
    if (c.flag("tau_sweep", false))
        for (std::size_t j = 0; j < sw.tau.size(); ++j)
            out.add("sweep/tau-" + fmt("%.6f", sw.tau[j]), sw.value[j], target, Metric::relative, "tau_sweep",
                    {{"tau", sw.tau[j]}});
}

void dirac_propagator(const Config& c, Cases& out)
{
    const GammaSet gs = gamma_set();
    out.add("clifford", clifford_residual(gs), 0.0, Metric::absolute, "clifford");
    const double m = positive(c, "mass", 1.2), ei = positive(c, "eps_i", 0.05);
    const cplx mt = std::sqrt(cplx(m * m, -ei));
    const std::vector<double> taus = c.list("tau_list", {0.02, 0.01, 0.005, 0.0025});
    const std::vector<std::array<double, 4>> ps{{0, 0, 0, 0}, {2.0, 0.3, -0.4, 0.2}, {0.5, 0.1, 0.0, -0.3}};
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& p = ps[i];
        const std::string k = "p" + idx(i, 1) + "/";
        const json pin{{"p", p}, {"mass", m}, {"eps_i", ei}};
        const Operator lim = dirac_propagator_limit(p, m, ei);
        const Operator X = gs.slash({p[0], p[1], p[2], p[3]}) - Operator::identity(4) * mt;
        out.add(k + "identity", max_abs_diff(X * lim, Operator::identity(4) * cplx(0, 1)), 0.0, Metric::absolute,
                "dirac_identity", pin);
        std::vector<double> err;
        for (double t : taus) {
            need(t > 0, "tau_list entries must be positive");
            const Operator G = dirac_mode_propagator(p, m, t, ei) * cplx(t);
            err.push_back(max_abs_diff(G, lim));
            if (c.flag("tau_sweep", false)) {
                double lmax = 0;
                for (std::size_t r = 0; r < 4; ++r)
                    for (std::size_t s = 0; s < 4; ++s) lmax = std::max(lmax, std::abs(lim(r, s)));
                out.add(k + "sweep/tau-" + fmt("%.6f", t), err.back() / lmax, 0.0, Metric::absolute, "tau_sweep",
                        {{"tau", t}, {"p", p}, {"value", "max |tau G - limit| / max |limit|"}});
            }
        }
        for (std::size_t j = 0; j + 1 < taus.size(); ++j)
            out.add(k + "order/tau-" + fmt("%.6f", taus[j + 1]), err[j + 1] / err[j], taus[j + 1] / taus[j],
                    Metric::relative, "order_ratio", {{"tau", taus[j + 1]}, {"p", p}});
    }

    // parity-weighted traces on six modes against the dense 2^6 trace
    const FermionLayout l(1, 6);
    const Operator hp = dirac_mode_matrix({0.9, 0.3, -0.2, 0.5}, m, ei);
    const Operator hq = dirac_mode_matrix({-0.4, 0.1, 0.6, 0.0}, m, ei);
    Operator h(Dims{6});
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) h(a, b) = hp(a, b);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) h(4 + a, 4 + b) = hq(a, b);
    const Operator S = fermion_quadratic(l, h);
    for (double t : {0.3, 1.7})
        for (bool par : {true, false}) {
            const Operator G = fermion_pair_correlator(h * cplx(0, t), par);
            double e = 0;
            for (std::size_t a = 0; a < 6; ++a)
                for (std::size_t b = 0; b < 6; ++b)
                    e = std::max(e, std::abs(parity_weighted_trace(l, S, t, {{a, false}, {b, true}}, par) - G(a, b)));
            out.add("parity-trace/tau-" + fmt("%.2f", t) + (par ? "/parity" : "/plain"), e, 0.0, Metric::absolute,
                    "parity_trace", {{"tau", t}, {"parity", par}});
        }
}

void fswap_cycle(const Config& c, Cases& out)
{
    const std::size_t N = count(c, "N", 3, 1, 12), M = count(c, "M", 2, 1, 12);
    need(N * M <= 12, "parameter out of cap: N x M above 12 fermionic modes");
    // |00>, |01>, |10>, |11> with the first mode slowest
    const double printed[4][4] = {{1, 0, 0, 0}, {0, 0, 1, 0}, {0, -1, 0, 0}, {0, 0, 0, 1}};
    const Operator F = fswap();
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t s = 0; s < 4; ++s)
            out.add("fswap/" + idx(r, 1) + idx(s, 1), F(r, s), printed[r][s], Metric::absolute, "exact");

    const FermionLayout l(N, M);
    out.add("anticommutators", anticommutator_residual(l), 0.0, Metric::absolute, "cycle", {{"N", N}, {"M", M}});
    const Operator C = fermionic_cycle(l), Cd = C.adjoint();
    for (std::size_t a = 0; a < l.modes(); ++a) {
        const CycleImage im = cycle_image(l, a);
        const double r = max_abs_diff(C * annihilation(l, a) * Cd, annihilation(l, im.mode) * cplx(im.sign));
        out.add("mode-" + idx(a, 2), r, 0.0, Metric::absolute, "cycle",
                {{"slice", a / M}, {"m", a % M}, {"image", im.mode}, {"sign", im.sign}});
    }
    out.add("parity-commutator", commutator(C, parity(l)).max_abs(), 0.0, Metric::absolute, "cycle");
    const SectorSigns s = cycle_power_signs(l);
    const double odd = (N * M - 1) % 2 ? -1.0 : 1.0;
    out.add("power/even", s.even, 1.0, Metric::absolute, "cycle", {{"N", N}, {"M", M}});
    out.add("power/odd", s.odd, odd, Metric::absolute, "cycle", {{"N", N}, {"M", M}});
}

using Runner = std::function<void(const Config&, Cases&)>;

const std::map<std::string, Runner>& registry()
{
    static const std::map<std::string, Runner> r{
        {"paw-conditioning", paw_conditioning},
        {"trace-theorem", trace_theorem},
        {"constraint-theorem", constraint_theorem},
        {"st-state-marginals", st_state_marginals},
        {"causality-witness", causality},
        {"pseudo-entropy", pseudo_entropy},
        {"anomaly-scan", anomaly},
        {"dirac-nogo", dirac_nogo},
        {"propagator", propagator},
        {"smatrix", smatrix},
        {"dirac-propagator", dirac_propagator},
        {"fswap-cycle", fswap_cycle},
    };
    return r;
}

} // namespace

// ---------------------------------------------------------------------------

Config Config::parse(std::istream& in, const std::string& origin)
{
    Config c;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
            throw ConfigError(origin + ":" + std::to_string(n) + ": expected key = value");
        c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

Config Config::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    return parse(f, path);
}

void Config::set(const std::string& key, const std::string& value)
{
    if (key.rfind("tol.", 0) == 0 && !default_tolerances().count(key.substr(4)))
        throw ConfigError("unknown tolerance " + key);
    values_[key] = value;
}

const std::string* Config::raw(const std::string& key) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

double Config::num(const std::string& key, double def) const
{
    const auto* r = raw(key);
    const double v = r ? parse_double(key, *r) : def;
    used_[key] = v;
    return v;
}

long Config::integer(const std::string& key, long def) const
{
    const auto* r = raw(key);
    long v = def;
    if (r) {
        const double x = parse_double(key, *r);
        if (x != std::floor(x) || std::abs(x) > 1e15) throw ConfigError("setting '" + key + "': not an integer");
        v = static_cast<long>(x);
    }
    used_[key] = v;
    return v;
}

bool Config::flag(const std::string& key, bool def) const
{
    const auto* r = raw(key);
    bool v = def;
    if (r) {
        if (*r == "1" || *r == "true" || *r == "yes" || *r == "on") v = true;
        else if (*r == "0" || *r == "false" || *r == "no" || *r == "off") v = false;
        else throw ConfigError("setting '" + key + "': expected true or false");
    }
    used_[key] = v;
    return v;
}

std::string Config::str(const std::string& key, const std::string& def) const
{
    const auto* r = raw(key);
    const std::string v = r ? *r : def;
    used_[key] = v;
    return v;
}

std::vector<double> Config::list(const std::string& key, const std::vector<double>& def) const
{
    const auto* r = raw(key);
    std::vector<double> v = def;
    if (r) {
        v.clear();
        std::stringstream ss(*r);
        std::string item;
        while (std::getline(ss, item, ',')) v.push_back(parse_double(key, trim(item)));
        if (v.empty()) throw ConfigError("setting '" + key + "': empty list");
    }
    used_[key] = v;
    return v;
}

std::uint64_t Config::seed() const
{
    const auto* r = raw("seed");
    std::uint64_t v = 20240611;
    if (r) {
        std::size_t pos = 0;
        try {
            v = std::stoull(*r, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != r->size() || (*r)[0] == '-') throw ConfigError("seed must be an unsigned 64-bit integer");
    }
    used_["seed"] = v;
    return v;
}

double Config::tol(const std::string& name) const
{
    const auto& d = default_tolerances();
    const auto it = d.find(name);
    if (it == d.end()) throw std::logic_error("unregistered tolerance " + name);
    const std::string key = "tol." + name;
    double v = it->second;
    if (const auto* r = raw(key)) v = parse_double(key, *r);
    else if (const auto* g = raw("tol")) v = parse_double("tol", *g);
    if (v < 0) throw ConfigError("tolerances must be non-negative");
    used_[key] = v;
    return v;
}

const std::map<std::string, double>& default_tolerances()
{
    static const std::map<std::string, double> t{
        {"anomaly_mismatch", 1e-9},
        {"anomaly_ratio", 0.05},
        {"bracket_delta", 1e-14},
        {"causality", 1e-10},
        {"clifford", 1e-14},
        {"conditioning", 1e-12},
        {"constraint", 1e-10},
        {"cycle", 1e-12},
        {"dirac_bracket", 1e-12},
        {"dirac_identity", 1e-12},
        {"exact", 0.0},
        {"internal_contraction", 1e-12},
        {"marginal", 1e-12},
        {"normal_ordered", 1e-9},
        {"order_ratio", 0.1},
        {"pair_correlator", 1e-8},
        {"parity_trace", 1e-10},
        {"power_trace", 1e-10},
        {"propagator_grid", 0.02},
        {"region", 1e-10},
        {"smatrix_limit", 0.01},
        {"smatrix_oracle", 0.02},
        {"smatrix_order2", 0.05},
        {"tau_sweep", 0.1},
        {"trace_theorem", 1e-10},
    };
    return t;
}

double Case::err() const
{
    const double a = abs_err(), o = std::abs(oracle);
    switch (metric) {
    case Metric::absolute: return a;
    case Metric::relative: return o > 0 ? a / o : (a > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    case Metric::scaled: return a / std::max(1.0, o);
    }
    return a;
}

bool Report::all_pass() const
{
    return std::all_of(cases.begin(), cases.end(), [](const Case& c) { return c.pass(); });
}

double Report::max_err() const
{
    double m = 0;
    for (const auto& c : cases) m = std::max(m, c.err());
    return m;
}

namespace {
const char* metric_name(Metric m)
{
    switch (m) {
    case Metric::absolute: return "absolute";
    case Metric::relative: return "relative";
    case Metric::scaled: return "scaled";
    }
    return "";
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
} // namespace

json Report::to_json() const
{
    json cs = json::array();
    std::size_t failed = 0;
    for (const auto& c : cases) {
        const double o = std::abs(c.oracle);
        cs.push_back({{"key", c.key},
                      {"inputs", c.inputs},
                      {"value", cj(c.value)},
                      {"oracle", cj(c.oracle)},
                      {"abs_err", c.abs_err()},
                      {"rel_err", o > 0 ? json(c.abs_err() / o) : json(nullptr)},
                      {"metric", metric_name(c.metric)},
                      {"tol_name", c.tol_name},
                      {"tol", c.tol},
                      {"pass", c.pass()}});
        failed += !c.pass();
    }
    return {{"schema", 1},
            {"experiment", experiment},
            {"params", params},
            {"cases", cs},
            {"summary", {{"max_err", finite_or_null(max_err())}, {"all_pass", all_pass()}, {"cases", cases.size()},
                         {"failed", failed}}}};
}

std::string Report::to_csv() const
{
    std::string s = "key,value_re,value_im,oracle_re,oracle_im,abs_err,rel_err,metric,tol,pass\n";
    for (const auto& c : cases) {
        const double o = std::abs(c.oracle);
        s += c.key + "," + num17(c.value.real()) + "," + num17(c.value.imag()) + "," + num17(c.oracle.real()) + "," +
             num17(c.oracle.imag()) + "," + num17(c.abs_err()) + "," + (o > 0 ? num17(c.abs_err() / o) : "") + "," +
             metric_name(c.metric) + "," + num17(c.tol) + "," + (c.pass() ? "true" : "false") + "\n";
    }
    return s;
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> n = [] {
        std::vector<std::string> v;
        for (const auto& [k, r] : registry()) v.push_back(k);
        return v;
    }();
    return n;
}

Report run_experiment(const std::string& name, const Config& cfg)
{
    const auto it = registry().find(name);
    if (it == registry().end()) throw ConfigError("unknown experiment '" + name + "'");
    Cases cases(cfg);
    try {
        it->second(cfg, cases);
    } catch (const std::length_error& e) {
        throw ConfigError(std::string("parameter out of cap: ") + e.what());
    }
    Report r{name, cfg.used(), std::move(cases.out)};
    std::stable_sort(r.cases.begin(), r.cases.end(), [](const Case& a, const Case& b) { return a.key < b.key; });
    for (std::size_t i = 1; i < r.cases.size(); ++i)
        if (r.cases[i].key == r.cases[i - 1].key) throw std::logic_error("duplicate case key " + r.cases[i].key);
    return r;
}

} // namespace sqm::cli
