#include <doctest.h>

#include <bit>
#include <cmath>

#include "test_util.hpp"
#include "udisc/scheme.hpp"
#include "udisc/simulator.hpp"

using namespace udisc;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

SchemeSpec make_spec(ExampleKind ex, int n, int w, Primitive p = Primitive::CNOT,
                     MeasurementKind m = MeasurementKind::Short) {
    SchemeSpec s;
    s.example = ex;
    s.n_copies = n;
    s.width = w;
    s.depth = n / w;
    s.primitive = p;
    s.measurement = m;
    return s;
}

Circuit prefix(const Circuit& c, std::size_t n) {
    Circuit out(c.n_qubits());
    for (std::size_t i = 0; i < n; ++i) out.add(c.ops()[i]);
    return out;
}

StateVector ghz(int w, cplx rel) {
    std::vector<cplx> a(std::size_t{1} << w, 0.0);
    a.front() = kR;
    a.back() = kR * rel;
    return StateVector(a);
}

// The single outcome string of a deterministic circuit.
std::string sole_outcome(const Circuit& c) {
    const auto d = exact_distribution(c);
    REQUIRE(d.size() == 1);
    CHECK(d.begin()->second == doctest::Approx(1.0).epsilon(1e-12));
    return d.begin()->first;
}

// Applies X on `mask` by permuting amplitudes.
StateVector flip(const StateVector& s, std::size_t mask) {
    std::vector<cplx> a(s.dimension());
    for (std::size_t i = 0; i < a.size(); ++i) a[i ^ mask] = s[i];
    return StateVector(a);
}

double branch_overlap(const StateVector& a, const StateVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) s += std::abs(a[i]) * std::abs(b[i]);
    return s;
}

}  // namespace

TEST_CASE("example pairs") {
    const auto p1 = example_pair(ExampleKind::Example1, 6);
    CHECK(max_abs_diff(p1.u(), ComplexMatrix::identity(2)) == 0.0);
    CHECK(max_abs_diff(p1.v(), rz_matrix(kPi / 6)) == 0.0);

    const auto p2 = example_pair(ExampleKind::Example2, 8);
    const auto sx = gate_matrix(Gate::sx(0));
    CHECK(max_abs_diff(p2.v(), sx * rz_matrix(kPi / 16) * sx) < 1e-15);
    CHECK(arc_function(p2.relative()) == doctest::Approx(kPi / 8));
    CHECK_ERROR(example_pair(ExampleKind::Custom, 2), ErrorCode::InvalidSpec);
    CHECK_ERROR(example_pair(ExampleKind::Example1, 0), ErrorCode::InvalidSpec);
}

TEST_CASE("CNOT entangler examples") {
    const auto e1 = build_entangler(1, Primitive::CNOT);
    REQUIRE(e1.circuit.ops().size() == 1);
    CHECK(e1.circuit.ops()[0] == Gate::h(0));

    const auto e6 = build_entangler(6, Primitive::CNOT);
    REQUIRE(e6.circuit.ops().size() == 6);
    CHECK(e6.circuit.ops()[0] == Gate::h(0));
    for (int k = 0; k < 5; ++k) CHECK(e6.circuit.ops()[k + 1] == Gate::cnot(k, k + 1));
    const auto out = run_statevector(e6.circuit);
    CHECK(out.overlap(ghz(6, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entangler outputs GHZ form for every width") {
    for (Primitive p : {Primitive::CNOT, Primitive::ECR}) {
        for (int w = 1; w <= 12; ++w) {
            CAPTURE(w);
            const auto e = build_entangler(w, p);
            const auto out = run_statevector(e.circuit);
            const std::size_t last = out.dimension() - 1;
            for (std::size_t i = 1; i < last; ++i) CHECK(std::abs(out[i]) < 1e-9);
            CHECK(std::abs(std::abs(out[0]) - kR) < 1e-9);
            CHECK(std::abs(std::abs(out[last]) - kR) < 1e-9);
            CHECK(std::abs(out[last] / out[0] - std::polar(1.0, e.relative_phase)) < 1e-9);
            CHECK(out.overlap(ghz(w, std::polar(1.0, e.relative_phase))) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("ECR entangler structure at six qubits") {
    const auto e = build_entangler(6, Primitive::ECR);
    CHECK(e.corrections.size() == 2);
    const auto& ops = e.circuit.ops();
    REQUIRE(ops.size() == 6 + 5 + e.corrections.size());
    for (int q = 0; q < 6; ++q) CHECK(ops[q] == Gate::sx(q));
    for (int k = 0; k < 5; ++k) CHECK(ops[6 + k] == Gate::ecr(k, k + 1));
    CHECK(e.circuit.two_qubit_count() == 5);
}

TEST_CASE("ECR corrections are minimal") {
    for (int w = 2; w <= 8; ++w) {
        CAPTURE(w);
        Circuit raw(w);
        for (int q = 0; q < w; ++q) raw.add(Gate::sx(q));
        for (int k = 0; k + 1 < w; ++k) raw.add(Gate::ecr(k, k + 1));
        const auto target = ghz(w, 1.0);
        const auto found = derive_pauli_corrections(raw, target);
        const auto out = run_statevector(raw);
        std::size_t found_mask = 0;
        for (int q : found) found_mask |= std::size_t{1} << q;
        CHECK(branch_overlap(flip(out, found_mask), target) >= 1.0 - 1e-9);
        for (std::size_t m = 0; m < (std::size_t{1} << w); ++m) {
            if (std::popcount(m) < static_cast<int>(found.size()))
                CHECK(branch_overlap(flip(out, m), target) < 1.0 - 1e-9);
        }
    }
}

TEST_CASE("derive_pauli_corrections examples") {
    const auto target = ghz(3, 1.0);
    CHECK(derive_pauli_corrections(build_entangler(3, Primitive::CNOT).circuit, target).empty());
    Circuit flipped = build_entangler(3, Primitive::CNOT).circuit;
    flipped.add(Gate::x(0));
    CHECK(derive_pauli_corrections(flipped, target) == std::vector<int>{0});

    Circuit h(2);
    h.add(Gate::h(0));
    CHECK_ERROR(derive_pauli_corrections(h, ghz(2, 1.0)), ErrorCode::CorrectionNotFound);
    CHECK_ERROR(derive_pauli_corrections(h, ghz(3, 1.0)), ErrorCode::DimensionMismatch);
}

TEST_CASE("derive_pauli_corrections above the exhaustive range") {
    Circuit c = build_entangler(14, Primitive::CNOT).circuit;
    c.add(Gate::x(3)).add(Gate::x(9));
    CHECK(derive_pauli_corrections(c, ghz(14, 1.0)) == std::vector<int>{3, 9});
}

TEST_CASE("six-qubit outcome fixtures, CNOT") {
    auto spec = make_spec(ExampleKind::Example1, 6, 6);
    CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H0)) == "000000");
    CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H1)) == "001000");
    spec.measurement = MeasurementKind::XOR;
    CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H0)) == "000000");
    CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H1)) == "111111");
}

TEST_CASE("six-qubit outcome fixtures, ECR") {
    auto spec = make_spec(ExampleKind::Example1, 6, 6, Primitive::ECR);
    CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H0)) == "000000");
    CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H1)) == "100000");
    spec.measurement = MeasurementKind::XOR;
    CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H0)) == "000000");
    CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H1)) == "111111");
}

TEST_CASE("Example 1 Short gives all zeros under H0 for every shape") {
    for (Primitive p : {Primitive::CNOT, Primitive::ECR}) {
        for (const auto& [w, d] : factorizations(12, 12)) {
            CAPTURE(w);
            const auto spec = make_spec(ExampleKind::Example1, 12, w, p);
            CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H0)) == std::string(w, '0'));
            CHECK(sole_outcome(assemble_scheme(spec, Hypothesis::H1)) != std::string(w, '0'));
        }
    }
}

TEST_CASE("Example 1 layers are RZ(π/N) on every qubit") {
    const auto spec = make_spec(ExampleKind::Example1, 6, 6);
    const auto c1 = assemble_scheme(spec, Hypothesis::H1);
    const auto prep = build_entangler(6, Primitive::CNOT).circuit.ops().size();
    for (int q = 0; q < 6; ++q) CHECK(c1.ops()[prep + q] == Gate::rz(q, kPi / 6));

    for (const auto& [w, d] : factorizations(12, 6)) {
        CAPTURE(w);
        const auto s = make_spec(ExampleKind::Example1, 12, w);
        const auto h0 = assemble_scheme(s, Hypothesis::H0);
        const auto h1 = assemble_scheme(s, Hypothesis::H1);
        REQUIRE(h0.ops().size() == h1.ops().size());
        std::size_t start = 0;
        while (h0.ops()[start] == h1.ops()[start]) ++start;
        Circuit layers(w);
        for (std::size_t i = start; i < start + static_cast<std::size_t>(w * d); ++i) layers.add(h1.ops()[i]);
        CHECK(max_abs_diff(circuit_unitary(layers), kron_power(rz_matrix(d * kPi / 12), w)) < 1e-12);
    }
}

TEST_CASE("single use at θ = π") {
    const auto spec = make_spec(ExampleKind::Example1, 1, 1);
    const auto a = sole_outcome(assemble_scheme(spec, Hypothesis::H0));
    const auto b = sole_outcome(assemble_scheme(spec, Hypothesis::H1));
    CHECK(a != b);
}

TEST_CASE("Example 2 state before measurement") {
    const auto spec = make_spec(ExampleKind::Example2, 4, 2, Primitive::CNOT, MeasurementKind::Parity);
    const auto c = assemble_scheme(spec, Hypothesis::H0);
    const std::size_t n = c.ops().size();
    std::size_t meas = 2;
    if (c.ops()[n - 3].kind == GateKind::RZ) meas = 3;
    const auto psi = run_statevector(prefix(c, n - meas));
    const double r = kR;
    CHECK(psi.overlap(StateVector({r, 0.0, 0.0, cplx(0.0, -r)})) == doctest::Approx(1.0).epsilon(1e-12));

    const auto d = exact_distribution(c);
    for (const auto& [bits, p] : d) CHECK(std::count(bits.begin(), bits.end(), '1') % 2 == 0);
}

TEST_CASE("Example 2 parity outcomes") {
    for (int n : {4, 16}) {
        for (const auto& [w, d] : factorizations(n, 8)) {
            CAPTURE(n);
            CAPTURE(w);
            const auto spec = make_spec(ExampleKind::Example2, n, w, Primitive::CNOT, MeasurementKind::Parity);
            for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
                double mass = 0.0;
                for (const auto& [bits, p] : exact_distribution(assemble_scheme(spec, h))) {
                    const int parity = std::count(bits.begin(), bits.end(), '1') % 2;
                    if (parity == (h == Hypothesis::H0 ? 0 : 1)) mass += p;
                }
                CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("collapse examples") {
    auto s = make_spec(ExampleKind::Example2, 4, 1);
    CHECK(max_abs_diff_up_to_phase(collapse_processed_unitary(s, Hypothesis::H0), rz_matrix(-kPi / 2)) < 1e-12);
    s = make_spec(ExampleKind::Example2, 4, 4);
    CHECK(max_abs_diff_up_to_phase(collapse_processed_unitary(s, Hypothesis::H1), kron_power(rz_matrix(kPi / 8), 4)) <
          1e-12);
    s = make_spec(ExampleKind::Example2, 1, 1);
    // √X·X·U·X·√X with U = √X·RZ(−π/2)·√X, multiplied out by hand.
    const auto sx = gate_matrix(Gate::sx(0));
    const auto x = gate_matrix(Gate::x(0));
    const auto hand = sx * x * (sx * rz_matrix(-kPi / 2) * sx) * x * sx;
    CHECK(max_abs_diff(collapse_processed_unitary(s, Hypothesis::H0), hand) < 1e-12);
    CHECK(max_abs_diff_up_to_phase(hand, rz_matrix(-kPi / 2)) < 1e-12);
}

TEST_CASE("collapse equals RZ powers for every shape") {
    for (int n : {4, 16}) {
        for (const auto& [w, d] : factorizations(n, 8)) {
            const auto s = make_spec(ExampleKind::Example2, n, w);
            for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
                const double sign = h == Hypothesis::H0 ? -1.0 : 1.0;
                const auto expect = kron_power(rz_matrix(sign * kPi / (2.0 * n)).pow(d), w);
                CHECK(max_abs_diff_up_to_phase(collapse_processed_unitary(s, h), expect) < 1e-10);
            }
        }
    }
    CHECK_ERROR(collapse_processed_unitary(make_spec(ExampleKind::Example2, 11, 11), Hypothesis::H0),
                ErrorCode::InvalidSpec);
}

TEST_CASE("collapse for Example 1 has no processing") {
    const auto s = make_spec(ExampleKind::Example1, 6, 3);
    CHECK(max_abs_diff(collapse_processed_unitary(s, Hypothesis::H1), kron_power(rz_matrix(kPi / 3), 3)) < 1e-12);
    CHECK(max_abs_diff(collapse_processed_unitary(s, Hypothesis::H0), ComplexMatrix::identity(8)) < 1e-12);
}

TEST_CASE("measurement construction") {
    for (Primitive p : {Primitive::CNOT, Primitive::ECR}) {
        CHECK(build_measurement(1, MeasurementKind::Short, p) == build_measurement(1, MeasurementKind::XOR, p));
        for (int w = 2; w <= 7; ++w) {
            const auto s = build_measurement(w, MeasurementKind::Short, p);
            const auto x = build_measurement(w, MeasurementKind::XOR, p);
            REQUIRE(x.ops().size() > s.ops().size());
            for (std::size_t i = 0; i < s.ops().size(); ++i) CHECK(x.ops()[i] == s.ops()[i]);
        }
    }
    const auto par = build_measurement(3, MeasurementKind::Parity, Primitive::CNOT);
    REQUIRE(par.ops().size() == 4);
    CHECK(par.ops()[0] == Gate::rz(0, kPi / 2));
    for (int q = 0; q < 3; ++q) CHECK(par.ops()[q + 1] == Gate::h(q));
    CHECK(short_measurement_root(6) == 2);
    CHECK(short_measurement_root(1) == 0);
}

TEST_CASE("Short and XOR are deterministic on GHZ inputs") {
    for (Primitive p : {Primitive::CNOT, Primitive::ECR}) {
        for (int w = 1; w <= 8; ++w) {
            CAPTURE(w);
            for (MeasurementKind m : {MeasurementKind::Short, MeasurementKind::XOR}) {
                Circuit c = build_measurement(w, m, p);
                for (double phase : {0.0, kPi}) {
                    const auto out = run_statevector(c, ghz(w, std::polar(1.0, phase)));
                    double top = 0.0;
                    for (std::size_t i = 0; i < out.dimension(); ++i) top = std::max(top, std::norm(out[i]));
                    CHECK(top == doctest::Approx(1.0).epsilon(1e-9));
                }
                if (m == MeasurementKind::XOR) {
                    const auto zero = run_statevector(c, ghz(w, 1.0));
                    const auto one = run_statevector(c, ghz(w, -1.0));
                    CHECK(std::norm(zero[0]) == doctest::Approx(1.0));
                    CHECK(std::norm(one[one.dimension() - 1]) == doctest::Approx(1.0));
                }
            }
        }
    }
}

TEST_CASE("cnot_via matches CNOT up to phase") {
    for (auto [c, t] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{0, 2}, std::pair{2, 1}}) {
        Circuit ref(3);
        ref.add(Gate::cnot(c, t));
        const auto via = cnot_via(Primitive::ECR, 3, c, t);
        CHECK(via.two_qubit_count() == 1);
        CHECK(via.ops()[0].kind == GateKind::ECR);
        CHECK(max_abs_diff_up_to_phase(circuit_unitary(via), circuit_unitary(ref)) < 1e-12);
        CHECK(cnot_via(Primitive::CNOT, 3, c, t) == ref);
    }
}

TEST_CASE("custom pairs") {
    SchemeSpec s = make_spec(ExampleKind::Custom, 4, 2);
    s.custom = CustomPair{rz_matrix(kPi / 8), rz_matrix(-kPi / 8), Processing::VDagger};
    for (const auto& [w, d] : factorizations(4)) {
        s.width = w;
        s.depth = d;
        for (MeasurementKind m : {MeasurementKind::Short, MeasurementKind::XOR, MeasurementKind::Parity}) {
            s.measurement = m;
            const auto d0 = exact_distribution(assemble_scheme(s, Hypothesis::H0));
            const auto d1 = exact_distribution(assemble_scheme(s, Hypothesis::H1));
            for (const auto& [bits, p] : d0) CHECK(d1.count(bits) == 0);
        }
    }

    SchemeSpec bad = make_spec(ExampleKind::Custom, 4, 4);
    bad.custom = CustomPair{ComplexMatrix::identity(2), rz_matrix(kPi / 6), Processing::VDagger};
    CHECK_ERROR(assemble_scheme(bad, Hypothesis::H0), ErrorCode::InvalidSpec);
}

TEST_CASE("custom pair with generic eigenbasis and no processing") {
    // U = I, V = W·RZ(π/3)·W† with a random W: three parallel uses reach θ = π.
    std::mt19937_64 rng(9);
    const auto w = testutil::random_unitary(2, rng);
    SchemeSpec s = make_spec(ExampleKind::Custom, 3, 3);
    s.custom = CustomPair{ComplexMatrix::identity(2), w * rz_matrix(kPi / 3) * w.adjoint(), Processing::None};
    const auto d0 = exact_distribution(assemble_scheme(s, Hypothesis::H0));
    const auto d1 = exact_distribution(assemble_scheme(s, Hypothesis::H1));
    REQUIRE(d0.size() == 1);
    REQUIRE(d1.size() == 1);
    CHECK(d0.begin()->first != d1.begin()->first);
}

TEST_CASE("spec validation") {
    auto s = make_spec(ExampleKind::Example1, 6, 3);
    s.depth = 3;
    CHECK_ERROR(assemble_scheme(s, Hypothesis::H0), ErrorCode::InvalidSpec);
    s = make_spec(ExampleKind::Example1, 6, 3);
    s.lambda = 2.0;
    CHECK_ERROR(s.validate(), ErrorCode::InvalidSpec);
    s = make_spec(ExampleKind::Example1, 21, 21);
    CHECK_ERROR(s.validate(), ErrorCode::InvalidSpec);
    s = make_spec(ExampleKind::Custom, 2, 2);
    CHECK_ERROR(s.validate(), ErrorCode::InvalidSpec);
}

TEST_CASE("lambda changes only the preparation phase") {
    auto s = make_spec(ExampleKind::Example1, 6, 3);
    s.lambda = std::polar(1.0, 0.8);
    CHECK(sole_outcome(assemble_scheme(s, Hypothesis::H0)) == "000");
    CHECK(sole_outcome(assemble_scheme(s, Hypothesis::H1)) == "010");
}

TEST_CASE("factorizations") {
    const std::vector<std::pair<int, int>> twelve{{1, 12}, {2, 6}, {3, 4}, {4, 3}, {6, 2}, {12, 1}};
    CHECK(factorizations(12) == twelve);
    std::vector<int> widths;
    for (const auto& [w, d] : factorizations(96)) {
        CHECK(w * d == 96);
        widths.push_back(w);
    }
    CHECK(widths == std::vector<int>{1, 2, 3, 4, 6, 8, 12, 16});
    CHECK(factorizations(7, 3).size() == 1);
    CHECK_ERROR(factorizations(0), ErrorCode::InvalidSpec);
}

TEST_CASE("suboptimal qubit circuit") {
    const auto c0 = assemble_suboptimal_qubit(64, 32, Hypothesis::H0);
    CHECK(c0.n_qubits() == 1);
    const auto d0 = exact_distribution(c0);
    // θ per qubit is 32·π/64 = π/2, so the single-qubit success is ½ + ½·sin(π/4).
    const double p = 0.5 + 0.5 * std::sin(kPi / 4);
    CHECK(d0.at("0") == doctest::Approx(p).epsilon(1e-9));
    const auto d1 = exact_distribution(assemble_suboptimal_qubit(64, 32, Hypothesis::H1));
    CHECK(d1.at("1") == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("string conversions") {
    CHECK(to_string(Primitive::ECR) == "ecr");
    CHECK(parse_primitive("cnot") == Primitive::CNOT);
    CHECK(parse_measurement("xor") == MeasurementKind::XOR);
    CHECK(parse_processing("none") == Processing::None);
    CHECK_ERROR(parse_primitive("cz"), ErrorCode::InvalidConfig);
    CHECK_ERROR(parse_measurement("long"), ErrorCode::InvalidConfig);
}
