#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "udisc/circuit.hpp"
#include "udisc/simulator.hpp"
#include "udisc/theory.hpp"

namespace udisc {

enum class Primitive { CNOT, ECR };
enum class MeasurementKind { Short, XOR, Parity };
enum class ExampleKind { Example1, Example2, Custom };
enum class Processing { None, VDagger };
enum class Hypothesis { H0, H1 };

std::string_view to_string(Primitive p);
std::string_view to_string(MeasurementKind m);
std::string_view to_string(ExampleKind e);
std::string_view to_string(Processing p);
Primitive parse_primitive(std::string_view s);
MeasurementKind parse_measurement(std::string_view s);
Processing parse_processing(std::string_view s);

struct CustomPair {
    ComplexMatrix u;
    ComplexMatrix v;
    Processing processing = Processing::VDagger;
};

/// Rectangular scheme: `depth` sequential layers of `width` parallel black-box
/// uses, n_copies = width·depth.
struct SchemeSpec {
    ExampleKind example = ExampleKind::Example1;
    int n_copies = 1;
    int width = 1;
    int depth = 1;
    Primitive primitive = Primitive::CNOT;
    MeasurementKind measurement = MeasurementKind::Short;
    cplx lambda = 1.0;  // relative phase of the discriminator; Example 2 always uses 1
    std::optional<CustomPair> custom;

    void validate() const;
};

/// The (U, V) pair behind an example at a given number of copies.
/// Example 1: (I, RZ(π/N)). Example 2: (√X·RZ(−π/2N)·√X, √X·RZ(π/2N)·√X).
UnitaryPair example_pair(ExampleKind example, int n_copies);

struct Entangler {
    Circuit circuit;
    double relative_phase = 0.0;  // output is (|0…0⟩ + e^{i·relative_phase}|1…1⟩)/√2 up to global phase
    std::vector<int> corrections; // qubits receiving a trailing X (ECR only)
};

/// GHZ preparation from |0…0⟩. CNOT: H on qubit 0 then a CNOT chain.
/// ECR: SX on every qubit, an ECR chain, then an X layer found by
/// derive_pauli_corrections.
Entangler build_entangler(int width, Primitive primitive);

/// Smallest X layer (fewest gates, then lexicographic qubit list) that brings
/// the circuit's output onto `target` up to a phase on each computational
/// basis component. Exhaustive up to 12 qubits; above that, only the layers
/// that map the two dominant output branches onto the target's two dominant
/// branches are tried.
std::vector<int> derive_pauli_corrections(const Circuit& c, const StateVector& target);

/// Qubit whose bit distinguishes the hypotheses after a CNOT short measurement.
int short_measurement_root(int width);

/// Measurement stage acting on a GHZ-form state. `align` is an RZ angle applied
/// to qubit 0 first, rotating the two hypothesis states onto relative phases
/// 0 and π; it defaults to π/2 for Parity and 0 otherwise.
///   Short : uncompute the GHZ state (CNOT: a two-sided chain rooted at
///           short_measurement_root; ECR: the exact inverse of the ECR
///           entangler) so the outcomes are 0…0 versus a single string.
///   XOR   : Short plus a CNOT fan-out so the outcomes are 0…0 versus 1…1.
///   Parity: H on every qubit; the hypotheses differ in outcome parity.
Circuit build_measurement(int width, MeasurementKind kind, Primitive primitive,
                          std::optional<double> align = std::nullopt);

/// Two-qubit gate sequence equal to CNOT(control, target) up to global phase,
/// using the requested primitive.
Circuit cnot_via(Primitive primitive, int n_qubits, int control, int target);

/// Preparation + black-box layers (with processing) + measurement, all qubits
/// measured.
Circuit assemble_scheme(const SchemeSpec& spec, Hypothesis hypothesis);

/// Product of the layer matrices between preparation and measurement,
/// X_d·B·X_{d−1}···X_1·B·X_0 with B the hypothesis' black box on every qubit.
/// Dense; limited to 10 qubits.
ComplexMatrix collapse_processed_unitary(const SchemeSpec& spec, Hypothesis hypothesis);

/// Divisor pairs (w, N/w) with w ≤ max_width, ordered by w.
std::vector<std::pair<int, int>> factorizations(int n_copies, int max_width = kMaxQubits);

/// One qubit of the majority-vote protocol: the Example 2 sequential circuit of
/// depth `depth` with black-box angles set for n_copies total uses.
Circuit assemble_suboptimal_qubit(int n_copies, int depth, Hypothesis hypothesis);

}  // namespace udisc
