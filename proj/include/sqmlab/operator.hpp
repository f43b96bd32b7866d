#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace sqm {

using cplx = std::complex<double>;
using Dims = std::vector<std::size_t>;

inline constexpr cplx I_{0.0, 1.0};

class dimension_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class singular_matrix_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::size_t product(const Dims& d);

// Square complex matrix, row-major, with a tensor factorization of its index.
// The first entry of dims is the slowest-varying tensor leg.
class Operator {
public:
    Operator() = default;
    explicit Operator(Dims dims);
    Operator(Dims dims, std::vector<cplx> entries);
    Operator(std::size_t n, std::initializer_list<cplx> entries);

    static Operator identity(const Dims& dims);
    static Operator identity(std::size_t n) { return identity(Dims{n}); }
    static Operator diag(const std::vector<cplx>& d);

    std::size_t dim() const { return n_; }
    const Dims& dims() const { return dims_; }
    Operator with_dims(Dims d) const;

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    cplx* data() { return a_.data(); }
    const cplx* data() const { return a_.data(); }
    const std::vector<cplx>& entries() const { return a_; }

    Operator adjoint() const;
    Operator transpose() const;
    cplx trace() const;
    double norm() const;      // Frobenius
    double max_abs() const;

    Operator& operator+=(const Operator& o);
    Operator& operator-=(const Operator& o);
    Operator& operator*=(cplx s);

private:
    Dims dims_;
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

class Ket {
public:
    Ket() = default;
    explicit Ket(Dims dims);
    Ket(Dims dims, std::vector<cplx> entries);
    Ket(std::initializer_list<cplx> entries);

    static Ket basis(const Dims& dims, std::size_t index);

    std::size_t dim() const { return v_.size(); }
    const Dims& dims() const { return dims_; }
    cplx& operator[](std::size_t i) { return v_[i]; }
    const cplx& operator[](std::size_t i) const { return v_[i]; }
    cplx* data() { return v_.data(); }
    const cplx* data() const { return v_.data(); }
    const std::vector<cplx>& entries() const { return v_; }

    double norm() const;
    Ket normalized() const;
    bool is_normalized(double tol = 1e-12) const;

    Ket& operator+=(const Ket& o);
    Ket& operator*=(cplx s);

private:
    Dims dims_;
    std::vector<cplx> v_;
};

Operator operator+(Operator a, const Operator& b);
Operator operator-(Operator a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(cplx s, Operator a);
Operator operator*(Operator a, cplx s);
Ket operator*(const Operator& a, const Ket& x);
Ket operator+(Ket a, const Ket& b);
Ket operator-(Ket a, const Ket& b);
Ket operator*(cplx s, Ket a);

cplx inner(const Ket& x, const Ket& y);   // <x|y>
Operator outer(const Ket& x, const Ket& y); // |x><y|
cplx expect(const Ket& x, const Operator& a);

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

Operator kron(const Operator& a, const Operator& b);
Ket kron(const Ket& a, const Ket& b);

// Trace out every tensor leg not listed in keep. Kept legs stay in their
// original order; keep must be strictly increasing-free of duplicates.
Operator partial_trace(const Operator& a, const std::vector<std::size_t>& keep);

struct InvOptions {
    double max_condition = 1e13;
};

Operator expm(const Operator& a);
Operator inv(const Operator& a, const InvOptions& opt = {});
Operator mpow(const Operator& a, unsigned k);

double max_abs_diff(const Operator& a, const Operator& b);
double max_abs_diff(const Ket& a, const Ket& b);
bool is_hermitian(const Operator& a, double tol = 1e-12);
bool is_unitary(const Operator& a, double tol = 1e-10);

// Eigen-backed helpers.
std::vector<double> hermitian_eigenvalues(const Operator& a);
std::vector<cplx> eigenvalues(const Operator& a);
std::vector<double> singular_values(const Operator& a);

struct Eigensystem {
    std::vector<double> values; // ascending
    Operator vectors;           // columns are eigenvectors
};
Eigensystem hermitian_eigensystem(const Operator& a);

} // namespace sqm
