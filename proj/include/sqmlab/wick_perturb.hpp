#pragma once

#include "sqmlab/operator.hpp"
#include "sqmlab/scm_constraints.hpp"

#include <utility>
#include <vector>

namespace sqm {

enum class FieldKind { field, create, annihilate };

// One operator in a Wick string. Insertions sharing a group id belong to the
// same interaction vertex; every external leg must have its own group.
struct Insertion {
    FieldKind kind = FieldKind::field;
    int group = 0;
};
using InsertionList = std::vector<Insertion>;

// Perfect matching; each pair is (i, j) with i < j, pairs sorted by i.
using Pairing = std::vector<std::pair<std::size_t, std::size_t>>;

// All (n-1)!! matchings. Index 0 is paired with 1, 2, ... in turn, then the
// rest recursively, so the order is fixed.
std::vector<Pairing> enumerate_pairings(std::size_t n);
std::size_t double_factorial(std::size_t n); // n!!

// Table of two-point values <X_i X_j> for i < j. Unset entries are errors.
class ContractionKernel {
public:
    explicit ContractionKernel(std::size_t n = 0);
    std::size_t size() const { return n_; }
    void set(std::size_t i, std::size_t j, cplx v);
    bool has(std::size_t i, std::size_t j) const;
    cplx operator()(std::size_t i, std::size_t j) const;

private:
    std::size_t n_;
    std::vector<cplx> v_;
    std::vector<char> set_;
};

// sum over pairings of prod kernel(i, j), earlier insertion on the left
cplx wick_evaluate(const InsertionList& ins, const ContractionKernel& kernel);
cplx wick_sum(const std::vector<Pairing>& pairings, const ContractionKernel& kernel);
cplx pairing_value(const Pairing& p, const ContractionKernel& kernel);

enum class Connectivity {
    full,             // one component over all groups (identity when there are no vertices)
    no_vacuum_bubbles // every component touches an external leg
};

std::vector<Pairing> connected_filter(const std::vector<Pairing>& pairings, const InsertionList& ins,
                                      Connectivity mode = Connectivity::full);

// External leg on the grid: frequency index n0 and spatial index vector n.
struct ExternalMode {
    int n0 = 0;
    std::vector<int> n;
};

struct ScatteringOptions {
    double eps_i = 0.1;
    double tau0 = 0.02;     // largest tau of the sweep
    std::size_t levels = 4; // tau0, tau0/2, ... extrapolated to 0
};

// Spacetime volume T * V attached to Kronecker deltas of continuum-normalized
// modes, a_cont = sqrt(T V) a.
double lattice_volume(const ModeGrid& grid);

// sum_z mu_z e^{-i Q z} for integer momentum labels Q = (Q0, Q), mu_z = eps:
// T V times the lattice Kronecker delta, evaluated on integers.
double vertex_sum(const ModeGrid& grid, int q0, const std::vector<int>& q);

// First order 2 -> 2 Tr[R'] at fixed tau: leg factors -i sqrt(2 E tau)(w - E + i eps_i),
// vertex -i tau^2 lambda / 4!, Wick contraction of phi^4(z) a^dag(p1) a^dag(p2) a(k1) a(k2).
cplx phi4_first_order_2to2_at(const ModeGrid& grid, double lambda, const ExternalMode& p1, const ExternalMode& p2,
                              const ExternalMode& k1, const ExternalMode& k2, double tau, double eps_i);

struct TauSweep {
    std::vector<double> tau;
    std::vector<cplx> value;
    cplx extrapolated;
};

// Neville polynomial extrapolation of value(tau) to tau = 0.
cplx extrapolate_to_zero(const std::vector<double>& tau, const std::vector<cplx>& value);

TauSweep phi4_first_order_sweep(const ModeGrid& grid, double lambda, const ExternalMode& p1, const ExternalMode& p2,
                                const ExternalMode& k1, const ExternalMode& k2, const ScatteringOptions& opt = {});

// tau -> 0 value; equals -i lambda T V delta for conserving modes.
cplx phi4_first_order_2to2(const ModeGrid& grid, double lambda, const ExternalMode& p1, const ExternalMode& p2,
                           const ExternalMode& k1, const ExternalMode& k2, const ScatteringOptions& opt = {});

// Spatial momenta only: <k1 k2| S |p1 p2> with on-shell external modes.
// order 1: tau-extrapolated first-order term.
// order 2: s-channel bubble, both vertices hosting one in-pair and one out-pair,
// evaluated at tau = eps (the discrete-time propagator).
cplx smatrix_element(const ModeGrid& grid, const std::vector<std::vector<int>>& in,
                     const std::vector<std::vector<int>>& out, double lambda, int order,
                     const ScatteringOptions& opt = {});

// Frequency index putting momentum n on shell; throws when E_n is not on the grid.
int on_shell_index(const ModeGrid& grid, const std::vector<int>& n, double tol = 1e-9);

// Standard-QM references.
// First-order Dyson term -i int_0^T <f|H_I(t)|i> dt on the truncated Fock space of
// the four external modes (n_max = 2 each), with relativistic, box-normalized states.
cplx first_order_dyson_oracle(const ModeGrid& grid, double lambda, const std::vector<std::vector<int>>& in,
                              const std::vector<std::vector<int>>& out, std::size_t quad_points = 64);

// Second-order s-channel term from the intermediate two-particle states,
// forward and backward time orderings, each propagator damped by e^{-eps_i |t|}.
cplx s_channel_dyson_oracle(const ModeGrid& grid, double lambda, const std::vector<std::vector<int>>& in,
                            const std::vector<std::vector<int>>& out, double eps_i);

} // namespace sqm
