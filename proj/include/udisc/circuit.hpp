#pragma once

#include <array>
#include <memory>
#include <string_view>
#include <vector>

#include "udisc/linalg.hpp"

namespace udisc {

// Qubit ordering is little-endian throughout: qubit q is bit q of a basis
// index, so an n-qubit operator acting as A_q on qubit q is
// A_{n-1} ⊗ ... ⊗ A_0. Two-qubit gate matrices take their first listed qubit
// as the first (more significant) tensor factor.

enum class GateKind { X, SX, RZ, H, CNOT, ECR, U1Q, U2Q };

std::string_view gate_name(GateKind kind);

struct Gate {
    GateKind kind = GateKind::X;
    std::array<int, 2> qubits{0, 0};
    double angle = 0.0;                            // RZ only
    std::shared_ptr<const ComplexMatrix> matrix;   // U1Q / U2Q only

    int arity() const noexcept;
    bool is_named() const noexcept { return kind != GateKind::U1Q && kind != GateKind::U2Q; }

    static Gate x(int q) { return {GateKind::X, {q, q}, 0.0, nullptr}; }
    static Gate sx(int q) { return {GateKind::SX, {q, q}, 0.0, nullptr}; }
    static Gate rz(int q, double phi) { return {GateKind::RZ, {q, q}, phi, nullptr}; }
    static Gate h(int q) { return {GateKind::H, {q, q}, 0.0, nullptr}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}, 0.0, nullptr}; }
    static Gate ecr(int first, int second) { return {GateKind::ECR, {first, second}, 0.0, nullptr}; }
    static Gate unitary1(int q, ComplexMatrix m);
    static Gate unitary2(int first, int second, ComplexMatrix m);

    friend bool operator==(const Gate& a, const Gate& b);
};

ComplexMatrix gate_matrix(const Gate& g);

/// RX(φ) = exp(−iφX/2); used by the noise model and tests.
ComplexMatrix rx_matrix(double phi);
ComplexMatrix rz_matrix(double phi);

/// Ordered gate list over a fixed register. Validates indices on insertion.
class Circuit {
public:
    Circuit() = default;
    explicit Circuit(int n_qubits);

    int n_qubits() const noexcept { return n_qubits_; }
    const std::vector<Gate>& ops() const noexcept { return ops_; }
    const std::vector<int>& measured() const noexcept { return measured_; }

    Circuit& add(Gate g);
    Circuit& append(const Circuit& other);
    Circuit& measure(int q);
    Circuit& measure_all();

    /// Gates reversed and individually inverted; measurements dropped.
    Circuit inverse() const;

    std::size_t two_qubit_count() const;

    friend bool operator==(const Circuit& a, const Circuit& b);

private:
    int n_qubits_ = 0;
    std::vector<Gate> ops_;
    std::vector<int> measured_;
};

}  // namespace udisc
