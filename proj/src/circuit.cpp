#include "udisc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "udisc/error.hpp"

namespace udisc {

namespace {

const cplx kI{0.0, 1.0};

ComplexMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix pauli_y() { return {{0.0, -kI}, {kI, 0.0}}; }

}  // namespace

std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::X: return "x";
        case GateKind::SX: return "sx";
        case GateKind::RZ: return "rz";
        case GateKind::H: return "h";
        case GateKind::CNOT: return "cx";
        case GateKind::ECR: return "ecr";
        case GateKind::U1Q: return "u1q";
        case GateKind::U2Q: return "u2q";
    }
    return "?";
}

int Gate::arity() const noexcept {
    switch (kind) {
        case GateKind::CNOT:
        case GateKind::ECR:
        case GateKind::U2Q: return 2;
        default: return 1;
    }
}

Gate Gate::unitary1(int q, ComplexMatrix m) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw Error(ErrorCode::DimensionMismatch, "single-qubit gate matrix must be 2x2");
    }
    Gate g{GateKind::U1Q, {q, q}, 0.0, nullptr};
    g.matrix = std::make_shared<const ComplexMatrix>(std::move(m));
    return g;
}

Gate Gate::unitary2(int first, int second, ComplexMatrix m) {
    if (m.rows() != 4 || m.cols() != 4) {
        throw Error(ErrorCode::DimensionMismatch, "two-qubit gate matrix must be 4x4");
    }
    Gate g{GateKind::U2Q, {first, second}, 0.0, nullptr};
    g.matrix = std::make_shared<const ComplexMatrix>(std::move(m));
    return g;
}

bool operator==(const Gate& a, const Gate& b) {
    if (a.kind != b.kind || a.qubits[0] != b.qubits[0]) return false;
    if (a.arity() == 2 && a.qubits[1] != b.qubits[1]) return false;
    if (a.kind == GateKind::RZ && a.angle != b.angle) return false;
    if (!a.is_named()) {
        if (!a.matrix || !b.matrix) return a.matrix == b.matrix;
        return max_abs_diff(*a.matrix, *b.matrix) == 0.0;
    }
    return true;
}

ComplexMatrix rx_matrix(double phi) {
    const double c = std::cos(phi / 2.0);
    const double s = std::sin(phi / 2.0);
    return {{c, -kI * s}, {-kI * s, c}};
}

ComplexMatrix rz_matrix(double phi) {
    return {{std::polar(1.0, -phi / 2.0), 0.0}, {0.0, std::polar(1.0, phi / 2.0)}};
}

ComplexMatrix gate_matrix(const Gate& g) {
    switch (g.kind) {
        case GateKind::X: return pauli_x();
        case GateKind::SX: {
            const cplx a{0.5, 0.5};
            const cplx b{0.5, -0.5};
            return {{a, b}, {b, a}};
        }
        case GateKind::RZ: return rz_matrix(g.angle);
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            return {{r, r}, {r, -r}};
        }
        case GateKind::CNOT:
            return {{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 1.0, 0.0}};
        case GateKind::ECR: {
            const auto id = ComplexMatrix::identity(2);
            return (kron(pauli_x(), id) - kron(pauli_y(), pauli_x())) * cplx(1.0 / std::sqrt(2.0));
        }
        case GateKind::U1Q:
        case GateKind::U2Q: return *g.matrix;
    }
    throw Error(ErrorCode::UnsupportedGate, "unknown gate kind");
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1) throw Error(ErrorCode::InvalidSpec, "circuit needs at least one qubit");
}

Circuit& Circuit::add(Gate g) {
    const int arity = g.arity();
    for (int k = 0; k < arity; ++k) {
        if (g.qubits[k] < 0 || g.qubits[k] >= n_qubits_) {
            throw Error(ErrorCode::InvalidSpec, std::string(gate_name(g.kind)) + " on qubit " +
                                                    std::to_string(g.qubits[k]) + " outside register of " +
                                                    std::to_string(n_qubits_));
        }
    }
    if (arity == 1) g.qubits[1] = g.qubits[0];
    if (arity == 2 && g.qubits[0] == g.qubits[1]) {
        throw Error(ErrorCode::InvalidSpec, "two-qubit gate needs distinct qubits");
    }
    if (g.kind == GateKind::RZ && !std::isfinite(g.angle)) {
        throw Error(ErrorCode::InvalidSpec, "rz angle must be finite");
    }
    if (!g.is_named() && !g.matrix) {
        throw Error(ErrorCode::InvalidSpec, "matrix gate without a matrix");
    }
    ops_.push_back(std::move(g));
    return *this;
}

Circuit& Circuit::append(const Circuit& other) {
    if (other.n_qubits_ != n_qubits_) {
        throw Error(ErrorCode::DimensionMismatch, "appending circuit over a different register");
    }
    for (const auto& g : other.ops_) ops_.push_back(g);
    for (int q : other.measured_) measure(q);
    return *this;
}

Circuit& Circuit::measure(int q) {
    if (q < 0 || q >= n_qubits_) throw Error(ErrorCode::InvalidSpec, "measured qubit out of range");
    if (std::find(measured_.begin(), measured_.end(), q) == measured_.end()) {
        measured_.insert(std::upper_bound(measured_.begin(), measured_.end(), q), q);
    }
    return *this;
}

Circuit& Circuit::measure_all() {
    for (int q = 0; q < n_qubits_; ++q) measure(q);
    return *this;
}

Circuit Circuit::inverse() const {
    Circuit inv(n_qubits_);
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
        const Gate& g = *it;
        switch (g.kind) {
            case GateKind::SX:
                // SX⁻¹ = X·SX, and the two commute.
                inv.add(Gate::x(g.qubits[0]));
                inv.add(Gate::sx(g.qubits[0]));
                break;
            case GateKind::RZ: inv.add(Gate::rz(g.qubits[0], -g.angle)); break;
            case GateKind::U1Q: inv.add(Gate::unitary1(g.qubits[0], g.matrix->adjoint())); break;
            case GateKind::U2Q:
                inv.add(Gate::unitary2(g.qubits[0], g.qubits[1], g.matrix->adjoint()));
                break;
            default: inv.add(g); break;
        }
    }
    return inv;
}

std::size_t Circuit::two_qubit_count() const {
    return static_cast<std::size_t>(
        std::count_if(ops_.begin(), ops_.end(), [](const Gate& g) { return g.arity() == 2; }));
}

bool operator==(const Circuit& a, const Circuit& b) {
    return a.n_qubits_ == b.n_qubits_ && a.ops_ == b.ops_ && a.measured_ == b.measured_;
}

}  // namespace udisc
