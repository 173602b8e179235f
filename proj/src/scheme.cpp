#include "udisc/scheme.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "udisc/error.hpp"

namespace udisc {

namespace {

constexpr double kAngleEps = 1e-12;

ComplexMatrix sx_matrix() { return gate_matrix(Gate::sx(0)); }
ComplexMatrix x_matrix() { return gate_matrix(Gate::x(0)); }

// Canonical RZ emission: wrapped into (−π, π], dropped when zero.
void add_rz(Circuit& c, int q, double phi) {
    phi = wrap_phase(phi);
    if (phi > kPi) phi -= kTwoPi;
    if (std::abs(phi) < kAngleEps) return;
    c.add(Gate::rz(q, phi));
}

StateVector ghz_state(int width, double relative_phase) {
    std::vector<cplx> amps(std::size_t{1} << width, 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    amps.front() = r;
    amps.back() += std::polar(r, relative_phase);
    return StateVector(std::move(amps));
}

void check_width(int width) {
    if (width < 1 || width > kMaxQubits) {
        throw Error(ErrorCode::InvalidSpec, "width " + std::to_string(width) + " outside 1.." +
                                                std::to_string(kMaxQubits));
    }
}

Entangler build_cnot_entangler(int width) {
    Entangler e{Circuit(width), 0.0, {}};
    e.circuit.add(Gate::h(0));
    for (int k = 0; k + 1 < width; ++k) e.circuit.add(Gate::cnot(k, k + 1));
    return e;
}

Entangler build_ecr_entangler(int width) {
    Circuit c(width);
    for (int q = 0; q < width; ++q) c.add(Gate::sx(q));
    for (int k = 0; k + 1 < width; ++k) c.add(Gate::ecr(k, k + 1));
    Entangler e{c, 0.0, derive_pauli_corrections(c, ghz_state(width, 0.0))};
    for (int q : e.corrections) e.circuit.add(Gate::x(q));
    const StateVector out = run_statevector(e.circuit);
    const double r = 1.0 / std::sqrt(2.0);
    if (std::abs(std::abs(out[0]) - r) > kDefaultTol || std::abs(std::abs(out[out.dimension() - 1]) - r) > kDefaultTol) {
        throw Error(ErrorCode::CorrectionNotFound, "ECR entangler output is not of GHZ form");
    }
    e.relative_phase = std::arg(out[out.dimension() - 1] / out[0]);
    return e;
}

// Relative phases of the two hypothesis states at the start of the measurement
// stage, both of the form (|a…a⟩ + e^{iγ}|b…b⟩)/√2 in the measurement frame.
struct HypothesisPhases {
    double h0 = 0.0;
    double h1 = 0.0;
};

struct CustomFrame {
    ComplexMatrix u_star;
    ComplexMatrix v_star;
    ComplexMatrix basis;  // columns: eigenvectors of v*†u*
    cplx alpha;
    cplx beta;
};

CustomFrame custom_frame(const SchemeSpec& spec) {
    const CustomPair& cp = *spec.custom;
    const ComplexMatrix mid = cp.processing == Processing::VDagger ? cp.v.adjoint() : ComplexMatrix::identity(2);
    ComplexMatrix u_star = cp.u;
    ComplexMatrix v_star = cp.v;
    for (int i = 1; i < spec.depth; ++i) {
        u_star = cp.u * mid * u_star;
        v_star = cp.v * mid * v_star;
    }
    const ComplexMatrix m = v_star.adjoint() * u_star;
    const UnitaryEigensystem es = eigensystem_unitary(m);
    CustomFrame f{u_star, v_star, es.vectors, std::polar(1.0, es.phases[0]), std::polar(1.0, es.phases[1])};
    const cplx sum = std::pow(f.alpha, spec.width) + std::pow(f.beta, spec.width);
    if (std::abs(sum) > 1e-8) {
        throw Error(ErrorCode::InvalidSpec,
                    "custom pair is not perfectly distinguishable with a GHZ discriminator at this width "
                    "(|α^w + β^w| = " + std::to_string(std::abs(sum)) + ")");
    }
    return f;
}

// Single-qubit operator accumulated on every qubit by the Example 2 layers.
ComplexMatrix example2_collapse_1q(int n_copies, int depth, Hypothesis h) {
    const double sign = h == Hypothesis::H0 ? -1.0 : 1.0;
    const ComplexMatrix black_box = sx_matrix() * rz_matrix(sign * kPi / (2.0 * n_copies)) * sx_matrix();
    ComplexMatrix acc = x_matrix() * sx_matrix();
    for (int i = 1; i <= depth; ++i) {
        acc = black_box * acc;
        acc = (i < depth ? x_matrix() : sx_matrix() * x_matrix()) * acc;
    }
    return acc;
}

HypothesisPhases hypothesis_phases(const SchemeSpec& spec) {
    const double lam = std::arg(spec.lambda);
    switch (spec.example) {
        case ExampleKind::Example1:
            return {lam, lam + spec.depth * kPi / spec.n_copies * spec.width};
        case ExampleKind::Example2: {
            // Each collapsed single-qubit operator is diagonal up to rounding.
            auto phase = [&](Hypothesis h) {
                const ComplexMatrix m = example2_collapse_1q(spec.n_copies, spec.depth, h);
                return spec.width * std::arg(m(1, 1) / m(0, 0));
            };
            return {phase(Hypothesis::H0), phase(Hypothesis::H1)};
        }
        case ExampleKind::Custom: {
            const CustomFrame f = custom_frame(spec);
            return {lam, lam + spec.width * (std::arg(f.alpha) - std::arg(f.beta))};
        }
    }
    return {};
}

// RZ angle on qubit 0 that moves the two hypothesis phases onto 0 and π.
double alignment_angle(const HypothesisPhases& p) {
    double delta = wrap_phase(p.h1 - p.h0);
    if (delta > kPi) delta -= kTwoPi;
    if (std::abs(delta) > kPi - kDefaultTol) delta = kPi;
    const double mid = p.h0 + delta / 2.0;
    return kPi / 2.0 - mid;
}

void append_short_core(Circuit& c, int width, Primitive primitive, double align) {
    if (primitive == Primitive::CNOT) {
        add_rz(c, 0, align);
        const int root = short_measurement_root(width);
        for (int k = width - 2; k >= root; --k) c.add(Gate::cnot(k, k + 1));
        for (int k = 1; k <= root; ++k) c.add(Gate::cnot(k, k - 1));
        c.add(Gate::h(root));
        return;
    }
    const Entangler e = build_entangler(width, Primitive::ECR);
    add_rz(c, 0, align + e.relative_phase);
    c.append(e.circuit.inverse());
}

// Noiseless outcome of the Short stage for the hypothesis landing on relative
// phase π.
std::size_t short_h1_outcome(int width, Primitive primitive) {
    Circuit c(width);
    append_short_core(c, width, primitive, 0.0);
    const StateVector out = run_statevector(c, ghz_state(width, kPi));
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.dimension(); ++i) {
        if (std::norm(out[i]) > std::norm(out[best])) best = i;
    }
    if (std::norm(out[best]) < 1.0 - kDefaultTol) {
        throw Error(ErrorCode::CorrectionNotFound, "short measurement is not deterministic");
    }
    return best;
}

Circuit assemble_unchecked(const SchemeSpec& spec, Hypothesis h) {
    const int w = spec.width;
    const Entangler ent = build_entangler(w, spec.primitive);
    Circuit c = ent.circuit;
    const double lam = spec.example == ExampleKind::Example2 ? 0.0 : std::arg(spec.lambda);
    add_rz(c, 0, lam - ent.relative_phase);

    const bool h1 = h == Hypothesis::H1;
    switch (spec.example) {
        case ExampleKind::Example1: {
            const double phi = h1 ? kPi / spec.n_copies : 0.0;
            for (int layer = 0; layer < spec.depth; ++layer) {
                for (int q = 0; q < w; ++q) c.add(Gate::rz(q, phi));
            }
            break;
        }
        case ExampleKind::Example2: {
            const double angle = (h1 ? 1.0 : -1.0) * kPi / (2.0 * spec.n_copies);
            for (int q = 0; q < w; ++q) c.add(Gate::sx(q)).add(Gate::x(q));
            for (int layer = 0; layer < spec.depth; ++layer) {
                if (layer > 0) {
                    for (int q = 0; q < w; ++q) c.add(Gate::x(q));
                }
                for (int q = 0; q < w; ++q) c.add(Gate::sx(q)).add(Gate::rz(q, angle)).add(Gate::sx(q));
            }
            for (int q = 0; q < w; ++q) c.add(Gate::x(q)).add(Gate::sx(q));
            break;
        }
        case ExampleKind::Custom: {
            const CustomFrame f = custom_frame(spec);
            const CustomPair& cp = *spec.custom;
            for (int q = 0; q < w; ++q) c.add(Gate::unitary1(q, f.basis));
            for (int layer = 0; layer < spec.depth; ++layer) {
                if (layer > 0 && cp.processing == Processing::VDagger) {
                    for (int q = 0; q < w; ++q) c.add(Gate::unitary1(q, cp.v.adjoint()));
                }
                for (int q = 0; q < w; ++q) c.add(Gate::unitary1(q, h1 ? cp.v : cp.u));
            }
            const ComplexMatrix back = f.basis.adjoint() * f.u_star.adjoint();
            for (int q = 0; q < w; ++q) c.add(Gate::unitary1(q, back));
            break;
        }
    }
    c.append(build_measurement(w, spec.measurement, spec.primitive, alignment_angle(hypothesis_phases(spec))));
    c.measure_all();
    return c;
}

}  // namespace

std::string_view to_string(Primitive p) { return p == Primitive::CNOT ? "cnot" : "ecr"; }

std::string_view to_string(MeasurementKind m) {
    switch (m) {
        case MeasurementKind::Short: return "short";
        case MeasurementKind::XOR: return "xor";
        case MeasurementKind::Parity: return "parity";
    }
    return "?";
}

std::string_view to_string(ExampleKind e) {
    switch (e) {
        case ExampleKind::Example1: return "1";
        case ExampleKind::Example2: return "2";
        case ExampleKind::Custom: return "custom";
    }
    return "?";
}

std::string_view to_string(Processing p) { return p == Processing::None ? "none" : "vdagger"; }

Primitive parse_primitive(std::string_view s) {
    if (s == "cnot") return Primitive::CNOT;
    if (s == "ecr") return Primitive::ECR;
    throw Error(ErrorCode::InvalidConfig, "unknown primitive '" + std::string(s) + "' (expected cnot|ecr)");
}

MeasurementKind parse_measurement(std::string_view s) {
    if (s == "short") return MeasurementKind::Short;
    if (s == "xor") return MeasurementKind::XOR;
    if (s == "parity") return MeasurementKind::Parity;
    throw Error(ErrorCode::InvalidConfig,
                "unknown measurement '" + std::string(s) + "' (expected short|xor|parity)");
}

Processing parse_processing(std::string_view s) {
    if (s == "none") return Processing::None;
    if (s == "vdagger") return Processing::VDagger;
    throw Error(ErrorCode::InvalidConfig, "unknown processing '" + std::string(s) + "' (expected none|vdagger)");
}

void SchemeSpec::validate() const {
    if (n_copies < 1 || depth < 1) throw Error(ErrorCode::InvalidSpec, "n_copies and depth must be positive");
    check_width(width);
    if (static_cast<long long>(width) * depth != n_copies) {
        throw Error(ErrorCode::InvalidSpec, "w·d = " + std::to_string(static_cast<long long>(width) * depth) +
                                                " does not match N = " + std::to_string(n_copies));
    }
    if (std::abs(std::abs(lambda) - 1.0) > kDefaultTol) {
        throw Error(ErrorCode::InvalidSpec, "lambda must have unit modulus");
    }
    if ((example == ExampleKind::Custom) != custom.has_value()) {
        throw Error(ErrorCode::InvalidSpec, "custom pair must be given exactly for the custom example");
    }
    if (custom) UnitaryPair(custom->u, custom->v);
    if (custom && (custom->u.rows() != 2 || custom->v.rows() != 2)) {
        throw Error(ErrorCode::InvalidSpec, "custom pair must be single-qubit");
    }
}

UnitaryPair example_pair(ExampleKind example, int n_copies) {
    if (n_copies < 1) throw Error(ErrorCode::InvalidSpec, "n_copies must be positive");
    switch (example) {
        case ExampleKind::Example1: return {ComplexMatrix::identity(2), rz_matrix(kPi / n_copies)};
        case ExampleKind::Example2: {
            const double a = kPi / (2.0 * n_copies);
            return {sx_matrix() * rz_matrix(-a) * sx_matrix(), sx_matrix() * rz_matrix(a) * sx_matrix()};
        }
        case ExampleKind::Custom: break;
    }
    throw Error(ErrorCode::InvalidSpec, "custom pairs carry their own matrices");
}

std::vector<int> derive_pauli_corrections(const Circuit& c, const StateVector& target) {
    const StateVector out = run_statevector(c);
    if (out.dimension() != target.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "target dimension differs from circuit register");
    }
    const int n = c.n_qubits();
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < target.dimension(); ++i) {
        if (std::abs(target[i]) > 1e-12) support.push_back(i);
    }
    // Phase-insensitive overlap between target and out with X on `mask`.
    auto score = [&](std::size_t mask) {
        double s = 0.0;
        for (std::size_t i : support) s += std::abs(target[i]) * std::abs(out[i ^ mask]);
        return s;
    };
    auto to_list = [n](std::size_t mask) {
        std::vector<int> qs;
        for (int q = 0; q < n; ++q) {
            if (mask >> q & 1U) qs.push_back(q);
        }
        return qs;
    };
    constexpr double kAccept = 1.0 - 1e-9;

    if (n <= 12) {
        // Masks ordered by popcount, then by lexicographic order of the qubit list.
        std::vector<std::size_t> masks(std::size_t{1} << n);
        for (std::size_t m = 0; m < masks.size(); ++m) masks[m] = m;
        std::sort(masks.begin(), masks.end(), [&](std::size_t a, std::size_t b) {
            const int pa = std::popcount(a);
            const int pb = std::popcount(b);
            if (pa != pb) return pa < pb;
            return to_list(a) < to_list(b);
        });
        for (std::size_t m : masks) {
            if (score(m) >= kAccept) return to_list(m);
        }
        throw Error(ErrorCode::CorrectionNotFound, "no X layer maps the circuit output onto the target");
    }

    auto top_two = [](const StateVector& s) {
        std::size_t a = 0;
        std::size_t b = 1;
        if (std::norm(s[b]) > std::norm(s[a])) std::swap(a, b);
        for (std::size_t i = 2; i < s.dimension(); ++i) {
            if (std::norm(s[i]) > std::norm(s[a])) {
                b = a;
                a = i;
            } else if (std::norm(s[i]) > std::norm(s[b])) {
                b = i;
            }
        }
        return std::pair{std::min(a, b), std::max(a, b)};
    };
    const auto [o0, o1] = top_two(out);
    const auto [t0, t1] = top_two(target);
    std::vector<std::size_t> candidates;
    if ((o0 ^ t0) == (o1 ^ t1)) candidates.push_back(o0 ^ t0);
    if ((o0 ^ t1) == (o1 ^ t0)) candidates.push_back(o0 ^ t1);
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        if (std::popcount(a) != std::popcount(b)) return std::popcount(a) < std::popcount(b);
        return to_list(a) < to_list(b);
    });
    for (std::size_t m : candidates) {
        if (score(m) >= kAccept) return to_list(m);
    }
    throw Error(ErrorCode::CorrectionNotFound, "no X layer maps the dominant branches onto the target");
}

Entangler build_entangler(int width, Primitive primitive) {
    check_width(width);
    if (primitive == Primitive::CNOT) return build_cnot_entangler(width);

    static std::mutex mu;
    static std::map<int, Entangler> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(width); it != cache.end()) return it->second;
    }
    Entangler e = build_ecr_entangler(width);
    std::lock_guard lock(mu);
    return cache.emplace(width, std::move(e)).first->second;
}

int short_measurement_root(int width) { return (width - 1) / 2; }

Circuit cnot_via(Primitive primitive, int n_qubits, int control, int target) {
    Circuit c(n_qubits);
    if (primitive == Primitive::CNOT) {
        c.add(Gate::cnot(control, target));
        return c;
    }
    // ECR = X_c·RX_t(π/2)·S_c·CNOT up to phase, so CNOT = S_c†·RX_t(−π/2)·X_c·ECR.
    c.add(Gate::ecr(control, target));
    c.add(Gate::x(control));
    c.add(Gate::x(target)).add(Gate::sx(target));
    c.add(Gate::rz(control, -kPi / 2.0));
    return c;
}

Circuit build_measurement(int width, MeasurementKind kind, Primitive primitive, std::optional<double> align) {
    check_width(width);
    const double a = align.value_or(kind == MeasurementKind::Parity ? kPi / 2.0 : 0.0);
    Circuit c(width);
    if (kind == MeasurementKind::Parity) {
        add_rz(c, 0, a);
        for (int q = 0; q < width; ++q) c.add(Gate::h(q));
        return c;
    }
    append_short_core(c, width, primitive, a);
    if (kind == MeasurementKind::XOR) {
        const std::size_t s = short_h1_outcome(width, primitive);
        const int j = std::countr_zero(s);
        for (int k = 0; k < width; ++k) {
            if (k != j && !(s >> k & 1U)) c.append(cnot_via(primitive, width, j, k));
        }
    }
    return c;
}

Circuit assemble_scheme(const SchemeSpec& spec, Hypothesis hypothesis) {
    spec.validate();
    return assemble_unchecked(spec, hypothesis);
}

ComplexMatrix collapse_processed_unitary(const SchemeSpec& spec, Hypothesis hypothesis) {
    spec.validate();
    if (spec.width > 10) throw Error(ErrorCode::InvalidSpec, "dense collapse limited to 10 qubits");
    const unsigned w = static_cast<unsigned>(spec.width);
    const bool h1 = hypothesis == Hypothesis::H1;

    ComplexMatrix black_box;
    ComplexMatrix first = ComplexMatrix::identity(2);
    ComplexMatrix between = ComplexMatrix::identity(2);
    ComplexMatrix last = ComplexMatrix::identity(2);
    switch (spec.example) {
        case ExampleKind::Example1:
            black_box = h1 ? rz_matrix(kPi / spec.n_copies) : ComplexMatrix::identity(2);
            break;
        case ExampleKind::Example2: {
            const UnitaryPair pair = example_pair(ExampleKind::Example2, spec.n_copies);
            black_box = h1 ? pair.v() : pair.u();
            first = x_matrix() * sx_matrix();
            between = x_matrix();
            last = sx_matrix() * x_matrix();
            break;
        }
        case ExampleKind::Custom:
            black_box = h1 ? spec.custom->v : spec.custom->u;
            if (spec.custom->processing == Processing::VDagger) between = spec.custom->v.adjoint();
            break;
    }

    const ComplexMatrix layer = kron_power(black_box, w);
    const ComplexMatrix mid = kron_power(between, w);
    ComplexMatrix acc = kron_power(first, w);
    for (int i = 1; i <= spec.depth; ++i) {
        acc = layer * acc;
        if (i < spec.depth) acc = mid * acc;
    }
    return kron_power(last, w) * acc;
}

std::vector<std::pair<int, int>> factorizations(int n_copies, int max_width) {
    if (n_copies < 1) throw Error(ErrorCode::InvalidSpec, "n_copies must be positive");
    std::vector<std::pair<int, int>> out;
    for (int w = 1; w <= std::min(n_copies, max_width); ++w) {
        if (n_copies % w == 0) out.emplace_back(w, n_copies / w);
    }
    return out;
}

Circuit assemble_suboptimal_qubit(int n_copies, int depth, Hypothesis hypothesis) {
    if (n_copies < 1 || depth < 1) throw Error(ErrorCode::InvalidSpec, "n_copies and depth must be positive");
    SchemeSpec spec;
    spec.example = ExampleKind::Example2;
    spec.n_copies = n_copies;
    spec.width = 1;
    spec.depth = depth;
    spec.measurement = MeasurementKind::Parity;
    return assemble_unchecked(spec, hypothesis);
}

}  // namespace udisc
