#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "udisc/circuit.hpp"
#include "udisc/linalg.hpp"

namespace udisc {

inline constexpr int kMaxQubits = 20;

/// Gate-level noise for trajectory sampling.
///
/// - p1 / p2: after every one-/two-qubit gate, with this probability a
///   uniformly random non-identity Pauli (3 or 15 choices) acts on the gate's
///   qubits.
/// - p_read: each measured bit is flipped independently with this probability.
/// - overrotation: systematic calibration error in radians. Every SX is
///   followed by RX(overrotation) and every X by RX(2·overrotation). RZ is
///   treated as virtual and H/CNOT/ECR as abstract, so they carry no
///   coherent error.
///
/// Idle qubits accrue no noise.
struct NoiseModel {
    double p1 = 0.0;
    double p2 = 0.0;
    double p_read = 0.0;
    double overrotation = 0.0;

    static NoiseModel ideal() { return {}; }

    /// Values shipped in configs/noise_default.json. Chosen to reproduce the
    /// qualitative width/depth behaviour of superconducting hardware; they are
    /// not measured device parameters.
    static NoiseModel default_fixture() { return {3e-4, 8e-3, 1.5e-2, 3e-3}; }

    void validate() const;
    bool is_zero() const { return p1 == 0.0 && p2 == 0.0 && p_read == 0.0 && overrotation == 0.0; }

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

enum class BitOrder {
    QubitZeroFirst,  // leftmost character is the lowest measured qubit
    QubitZeroLast,   // leftmost character is the highest measured qubit
};

/// Bit i of `key` is the i-th measured qubit.
std::string format_outcome(std::uint64_t key, std::size_t n_bits, BitOrder order = BitOrder::QubitZeroFirst);

struct OutcomeCounts {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    std::uint64_t count(const std::string& bits) const;
};

StateVector run_statevector(const Circuit& c);
StateVector run_statevector(const Circuit& c, const StateVector& input);

/// Full unitary of a circuit (column k = image of |k⟩); at most 10 qubits.
ComplexMatrix circuit_unitary(const Circuit& c);

/// Born-rule distribution over the measured qubits (all qubits when none
/// are flagged). Entries below 1e-15 are dropped.
std::map<std::string, double> exact_distribution(const Circuit& c, BitOrder order = BitOrder::QubitZeroFirst);

/// Per-shot outcome keys, in shot order. Shot s draws from its own generator
/// seeded with derive_seed(seed, {s}); within a shot the draws are, in order:
///   1. for every gate with a nonzero error rate, one uniform deciding whether
///      a Pauli fires, plus one uniform choosing it when it does;
///   2. one uniform selecting the measurement outcome;
///   3. when p_read > 0, one uniform per measured bit (ascending qubit order).
std::vector<std::uint64_t> sample_shots(const Circuit& c, std::uint64_t shots, const NoiseModel& noise,
                                        std::uint64_t seed);

OutcomeCounts sample_counts(const Circuit& c, std::uint64_t shots, const NoiseModel& noise, std::uint64_t seed,
                            BitOrder order = BitOrder::QubitZeroFirst);

}  // namespace udisc
