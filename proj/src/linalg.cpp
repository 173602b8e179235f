#include "udisc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "udisc/error.hpp"

namespace udisc {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
    }
}

void require_square(const ComplexMatrix& m, const char* op) {
    if (!m.is_square() || m.empty()) {
        throw Error(ErrorCode::NonSquare, std::string(op) + ": matrix is " +
                                              std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "entry count " + std::to_string(entries_.size()) + " != rows*cols");
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

cplx ComplexMatrix::trace() const {
    require_square(*this, "trace");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix product inner dimensions differ");
    }
    ComplexMatrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const cplx a = (*this)(r, k);
            if (a == cplx{}) continue;
            const cplx* brow = &rhs.entries_[k * rhs.cols_];
            cplx* orow = &out.entries_[r * out.cols_];
            for (std::size_t c = 0; c < rhs.cols_; ++c) orow[c] += a * brow[c];
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    require_same_shape(*this, rhs, "operator+");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += rhs.entries_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    require_same_shape(*this, rhs, "operator-");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] -= rhs.entries_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator*(cplx scalar) const {
    ComplexMatrix out = *this;
    for (auto& e : out.entries_) e *= scalar;
    return out;
}

std::vector<cplx> ComplexMatrix::apply(std::span<const cplx> v) const {
    if (v.size() != cols_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix-vector product dimension mismatch");
    }
    std::vector<cplx> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        cplx acc = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

ComplexMatrix ComplexMatrix::pow(unsigned exponent) const {
    require_square(*this, "pow");
    ComplexMatrix result = identity(rows_);
    ComplexMatrix base = *this;
    while (exponent > 0) {
        if (exponent & 1u) result = result * base;
        exponent >>= 1u;
        if (exponent > 0) base = base * base;
    }
    return result;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "kron of empty matrix");
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const cplx s = a(ar, ac);
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
        }
    return out;
}

ComplexMatrix kron_power(const ComplexMatrix& a, unsigned n) {
    if (n == 0) throw Error(ErrorCode::DimensionMismatch, "kron_power needs n >= 1");
    ComplexMatrix out = a;
    for (unsigned i = 1; i < n; ++i) out = kron(out, a);
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    return worst;
}

double max_abs_diff_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "max_abs_diff_up_to_phase");
    const auto eb = b.entries();
    const auto ea = a.entries();
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < eb.size(); ++i)
        if (std::abs(eb[i]) > std::abs(eb[pivot])) pivot = i;
    cplx phase = 1.0;
    if (std::abs(eb[pivot]) > 0.0 && std::abs(ea[pivot]) > 0.0) {
        const cplx ratio = ea[pivot] / eb[pivot];
        phase = ratio / std::abs(ratio);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < ea.size(); ++i)
        worst = std::max(worst, std::abs(ea[i] - phase * eb[i]));
    return worst;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    require_square(m, "is_unitary");
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += std::conj(m(k, i)) * m(k, j);
            if (i == j) acc -= 1.0;
            if (std::abs(acc) > tol) return false;
        }
    }
    return true;
}

cplx determinant(const ComplexMatrix& m) {
    require_square(m, "determinant");
    const std::size_t n = m.rows();
    std::vector<cplx> a(m.entries().begin(), m.entries().end());
    cplx det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) == 0.0) return 0.0;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
            det = -det;
        }
        const cplx p = a[col * n + col];
        det *= p;
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = a[r * n + col] / p;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
        }
    }
    return det;
}

double wrap_phase(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

UnitaryEigensystem eigensystem_unitary(const ComplexMatrix& u, double tol) {
    require_square(u, "eigensystem_unitary");
    if (!is_unitary(u, tol)) {
        throw Error(ErrorCode::NotUnitary, "eigensystem_unitary: input fails unitarity check");
    }
    const auto n = static_cast<Eigen::Index>(u.rows());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            m(r, c) = u(static_cast<std::size_t>(r), static_cast<std::size_t>(c));

    // A normal matrix has a diagonal Schur form, so the Schur vectors are an
    // orthonormal eigenbasis even for repeated eigenvalues.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m);
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "complex Schur iteration did not converge");
    }
    const Eigen::MatrixXcd& t = schur.matrixT();
    const Eigen::MatrixXcd& q = schur.matrixU();

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::vector<double> phases(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx lambda = t(k, k);
        phases[static_cast<std::size_t>(k)] = wrap_phase(std::arg(lambda));
        const Eigen::VectorXcd residual = m * q.col(k) - lambda * q.col(k);
        if (residual.norm() > 10.0 * tol || std::abs(std::abs(lambda) - 1.0) > 10.0 * tol) {
            throw Error(ErrorCode::NoConvergence,
                        "eigenpair residual " + std::to_string(residual.norm()) +
                            " exceeds tolerance");
        }
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return phases[a] < phases[b]; });

    UnitaryEigensystem out;
    out.vectors = ComplexMatrix(u.rows(), u.rows());
    out.phases.reserve(order.size());
    for (std::size_t col = 0; col < order.size(); ++col) {
        const auto k = static_cast<Eigen::Index>(order[col]);
        out.phases.push_back(phases[order[col]]);
        Eigen::Index big = 0;
        for (Eigen::Index r = 1; r < n; ++r)
            if (std::abs(q(r, k)) > std::abs(q(big, k)) + 1e-12) big = r;
        const cplx fix = std::conj(q(big, k)) / std::abs(q(big, k));
        for (Eigen::Index r = 0; r < n; ++r)
            out.vectors(static_cast<std::size_t>(r), col) = q(r, k) * fix;
    }
    return out;
}

std::vector<double> eigenphases_unitary(const ComplexMatrix& u, double tol) {
    return eigensystem_unitary(u, tol).phases;
}

StateVector::StateVector(std::vector<cplx> amplitudes, double tol) : amps_(std::move(amplitudes)) {
    if (amps_.empty()) throw Error(ErrorCode::InvalidState, "empty state vector");
    const double n = norm();
    if (std::abs(n - 1.0) > tol) {
        throw Error(ErrorCode::InvalidState, "state norm " + std::to_string(n) + " differs from 1");
    }
}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (index >= dim) throw Error(ErrorCode::DimensionMismatch, "basis index out of range");
    std::vector<cplx> amps(dim);
    amps[index] = 1.0;
    return StateVector(std::move(amps));
}

int StateVector::n_qubits() const {
    const std::size_t dim = amps_.size();
    if ((dim & (dim - 1)) != 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "dimension " + std::to_string(dim) + " is not a power of two");
    }
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    return n;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

cplx StateVector::inner(const StateVector& other) const {
    if (other.dimension() != dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "inner product of states with different dimension");
    }
    cplx acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
    return acc;
}

}  // namespace udisc
