#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace udisc {

using cplx = std::complex<double>;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Dense complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const cplx> diag);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return entries_.empty(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const cplx> entries() const noexcept { return entries_; }

    ComplexMatrix adjoint() const;
    cplx trace() const;

    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(cplx scalar) const;

    /// Matrix-vector product.
    std::vector<cplx> apply(std::span<const cplx> v) const;

    /// Integer power by repeated squaring; square matrices only.
    ComplexMatrix pow(unsigned exponent) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// a ⊗ a ⊗ ... ⊗ a (n factors, n ≥ 1).
ComplexMatrix kron_power(const ComplexMatrix& a, unsigned n);

/// ‖a − b‖_max.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// min over unit scalars c of ‖a − c·b‖_max, evaluated with c aligned on the
/// largest entry of b.
double max_abs_diff_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_unitary(const ComplexMatrix& m, double tol = kDefaultTol);

cplx determinant(const ComplexMatrix& m);

/// Normalized eigendecomposition of a unitary matrix. Columns of `vectors`
/// are orthonormal eigenvectors, ordered by ascending phase; each column's
/// largest-modulus component is real and positive.
struct UnitaryEigensystem {
    std::vector<double> phases;  // in [0, 2π)
    ComplexMatrix vectors;
};

UnitaryEigensystem eigensystem_unitary(const ComplexMatrix& u, double tol = kDefaultTol);

std::vector<double> eigenphases_unitary(const ComplexMatrix& u, double tol = kDefaultTol);

/// Maps any real angle into [0, 2π).
double wrap_phase(double phi);

/// Normalized vector of complex amplitudes. Dimension need not be a power of
/// two; qubit-count queries require it.
class StateVector {
public:
    explicit StateVector(std::vector<cplx> amplitudes, double tol = kDefaultTol);

    /// Computational basis state |index⟩ of n qubits.
    static StateVector basis(int n_qubits, std::size_t index = 0);

    std::size_t dimension() const noexcept { return amps_.size(); }
    int n_qubits() const;

    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    double norm() const;

    /// ⟨this|other⟩.
    cplx inner(const StateVector& other) const;

    /// Fidelity-style overlap |⟨this|other⟩| after removing global phase.
    double overlap(const StateVector& other) const { return std::abs(inner(other)); }

private:
    std::vector<cplx> amps_;
};

}  // namespace udisc
