#include "udisc/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "udisc/error.hpp"
#include "udisc/rng.hpp"

namespace udisc {

namespace {

using Mat2 = std::array<cplx, 4>;
using Mat4 = std::array<cplx, 16>;

constexpr Mat2 kIdentity2{1.0, 0.0, 0.0, 1.0};

Mat2 to_mat2(const ComplexMatrix& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

Mat4 to_mat4(const ComplexMatrix& m) {
    Mat4 out{};
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) out[r * 4 + c] = m(r, c);
    return out;
}

// Plain complex product; std::complex's operator* guards inf/nan cases through
// a library call, which dominates the gate kernels otherwise.
inline cplx cmul(const cplx& a, const cplx& b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

const std::array<Mat2, 4>& paulis() {
    static const std::array<Mat2, 4> table{
        kIdentity2,
        Mat2{0.0, 1.0, 1.0, 0.0},
        Mat2{0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0},
        Mat2{1.0, 0.0, 0.0, -1.0},
    };
    return table;
}

void apply_1q(std::vector<cplx>& psi, int q, const Mat2& m) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t dim = psi.size();
    if (m[1] == cplx{} && m[2] == cplx{}) {
        for (std::size_t i = 0; i < dim; ++i) psi[i] = cmul(psi[i], (i & stride) ? m[3] : m[0]);
        return;
    }
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t j = base; j < base + stride; ++j) {
            const cplx a = psi[j];
            const cplx b = psi[j + stride];
            psi[j] = cmul(m[0], a) + cmul(m[1], b);
            psi[j + stride] = cmul(m[2], a) + cmul(m[3], b);
        }
    }
}

void apply_2q(std::vector<cplx>& psi, int first, int second, const Mat4& m) {
    const std::size_t mf = std::size_t{1} << first;
    const std::size_t ms = std::size_t{1} << second;
    const std::size_t lo = std::min(mf, ms);
    const std::size_t hi = std::max(mf, ms);
    const std::size_t quarter = psi.size() / 4;
    for (std::size_t k = 0; k < quarter; ++k) {
        // Spread k around the two target bit positions.
        std::size_t base = k;
        base = (base & (lo - 1)) | ((base & ~(lo - 1)) << 1);
        base = (base & (hi - 1)) | ((base & ~(hi - 1)) << 1);
        const std::array<std::size_t, 4> idx{base, base | ms, base | mf, base | mf | ms};
        const std::array<cplx, 4> v{psi[idx[0]], psi[idx[1]], psi[idx[2]], psi[idx[3]]};
        for (std::size_t r = 0; r < 4; ++r) {
            psi[idx[r]] = cmul(m[r * 4 + 0], v[0]) + cmul(m[r * 4 + 1], v[1]) + cmul(m[r * 4 + 2], v[2]) +
                          cmul(m[r * 4 + 3], v[3]);
        }
    }
}

// Pauli on one or two local qubits as bits: x0 | z0 << 1 | x1 << 2 | z1 << 3,
// local qubit 0 being the gate's first listed qubit.
using PauliBits = std::uint8_t;

PauliBits code_bits(int code) {
    const bool x = code == 1 || code == 2;
    const bool z = code == 2 || code == 3;
    return static_cast<PauliBits>(x | (z << 1));
}

int bits_code(unsigned b) {
    const bool x = b & 1U;
    const bool z = b & 2U;
    return x ? (z ? 2 : 1) : (z ? 3 : 0);
}

ComplexMatrix local_pauli(unsigned bits, int arity) {
    auto one = [](unsigned b) {
        const Mat2& p = paulis()[static_cast<std::size_t>(bits_code(b))];
        return ComplexMatrix{{p[0], p[1]}, {p[2], p[3]}};
    };
    if (arity == 1) return one(bits & 3U);
    return kron(one(bits & 3U), one(bits >> 2 & 3U));
}

struct PreparedOp {
    int arity = 1;
    int q0 = 0;
    int q1 = 0;
    Mat2 m1{};
    Mat4 m2{};
    bool monomial = false;            // two-qubit matrix with one nonzero per row
    std::array<int, 4> perm{};
    bool clifford = false;
    std::array<PauliBits, 4> image{};  // conjugated X0, Z0, X1, Z1
};

void classify_op(PreparedOp& op, const ComplexMatrix& m) {
    const int dim = op.arity == 1 ? 2 : 4;
    const unsigned n_paulis = op.arity == 1 ? 4U : 16U;
    const std::array<unsigned, 4> gens{1U, 2U, 4U, 8U};
    op.clifford = true;
    for (int k = 0; k < 2 * op.arity && op.clifford; ++k) {
        const ComplexMatrix q = m * local_pauli(gens[static_cast<std::size_t>(k)], op.arity) * m.adjoint();
        bool found = false;
        for (unsigned cand = 1; cand < n_paulis && !found; ++cand) {
            const cplx t = (local_pauli(cand, op.arity).adjoint() * q).trace() / static_cast<double>(dim);
            if (std::abs(std::abs(t) - 1.0) < 1e-9) {
                op.image[static_cast<std::size_t>(k)] = static_cast<PauliBits>(cand);
                found = true;
            }
        }
        op.clifford = found;
    }
    if (op.arity == 2) {
        op.monomial = true;
        for (int r = 0; r < 4 && op.monomial; ++r) {
            int nonzero = 0;
            for (int c = 0; c < 4; ++c) {
                if (op.m2[static_cast<std::size_t>(r * 4 + c)] != cplx{}) {
                    ++nonzero;
                    op.perm[static_cast<std::size_t>(r)] = c;
                }
            }
            op.monomial = nonzero == 1;
        }
    }
}

std::vector<PreparedOp> prepare(const Circuit& c, double overrotation) {
    std::vector<PreparedOp> ops;
    ops.reserve(c.ops().size());
    const ComplexMatrix drift1 = rx_matrix(overrotation);
    const ComplexMatrix drift2 = rx_matrix(2.0 * overrotation);
    for (const Gate& g : c.ops()) {
        PreparedOp op;
        op.arity = g.arity();
        op.q0 = g.qubits[0];
        op.q1 = g.qubits[1];
        ComplexMatrix m = gate_matrix(g);
        if (overrotation != 0.0) {
            if (g.kind == GateKind::SX) m = drift1 * m;
            if (g.kind == GateKind::X) m = drift2 * m;
        }
        if (op.arity == 1) {
            op.m1 = to_mat2(m);
        } else {
            op.m2 = to_mat4(m);
        }
        classify_op(op, m);
        ops.push_back(op);
    }
    return ops;
}

void apply_prepared_2q(std::vector<cplx>& psi, const PreparedOp& op) {
    if (!op.monomial) {
        apply_2q(psi, op.q0, op.q1, op.m2);
        return;
    }
    const std::size_t mf = std::size_t{1} << op.q0;
    const std::size_t ms = std::size_t{1} << op.q1;
    const std::size_t lo = std::min(mf, ms);
    const std::size_t hi = std::max(mf, ms);
    const std::size_t quarter = psi.size() / 4;
    for (std::size_t k = 0; k < quarter; ++k) {
        std::size_t base = k;
        base = (base & (lo - 1)) | ((base & ~(lo - 1)) << 1);
        base = (base & (hi - 1)) | ((base & ~(hi - 1)) << 1);
        const std::array<std::size_t, 4> idx{base, base | ms, base | mf, base | mf | ms};
        const std::array<cplx, 4> v{psi[idx[0]], psi[idx[1]], psi[idx[2]], psi[idx[3]]};
        for (std::size_t r = 0; r < 4; ++r) {
            const auto c = static_cast<std::size_t>(op.perm[r]);
            psi[idx[r]] = cmul(op.m2[r * 4 + c], v[c]);
        }
    }
}

struct PauliEvent {
    std::size_t gate = 0;
    int code = 0;  // 1..3 for one-qubit gates, 1..15 for two-qubit gates (first*4 + second)
};

// Pauli frame over the whole register, phases dropped.
struct Frame {
    std::uint32_t x = 0;
    std::uint32_t z = 0;

    unsigned local(int q) const { return (x >> q & 1U) | (z >> q & 1U) << 1; }

    void set_local(int q, unsigned b) {
        const std::uint32_t bit = std::uint32_t{1} << q;
        x = (x & ~bit) | ((b & 1U) ? bit : 0U);
        z = (z & ~bit) | ((b & 2U) ? bit : 0U);
    }

    void multiply(const PreparedOp& op, int code) {
        if (op.arity == 1) {
            set_local(op.q0, local(op.q0) ^ code_bits(code));
        } else {
            set_local(op.q0, local(op.q0) ^ code_bits(code / 4));
            set_local(op.q1, local(op.q1) ^ code_bits(code % 4));
        }
    }

    // Moves the frame from just before a Clifford op to just after it.
    void conjugate(const PreparedOp& op) {
        unsigned in = local(op.q0);
        if (op.arity == 2) in |= local(op.q1) << 2;
        unsigned out = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            if (in >> k & 1U) out ^= op.image[k];
        }
        set_local(op.q0, out & 3U);
        if (op.arity == 2) set_local(op.q1, out >> 2 & 3U);
    }
};

// Runs prepared ops, merging runs of one-qubit gates per qubit into a single
// 2x2 until a two-qubit gate touches that qubit. Pauli events sit right after
// their gate.
class FusedRunner {
public:
    explicit FusedRunner(int n_qubits)
        : n_(n_qubits), pending_(static_cast<std::size_t>(n_qubits), kIdentity2),
          dirty_(static_cast<std::size_t>(n_qubits), false) {}

    void fold(int q, const Mat2& m) {
        auto& p = pending_[static_cast<std::size_t>(q)];
        p = mul(m, p);
        dirty_[static_cast<std::size_t>(q)] = true;
    }

    /// Ops [begin, end); `events` must be sorted by gate and lie in that range.
    void run(const std::vector<PreparedOp>& ops, std::size_t begin, std::size_t end,
             std::span<const PauliEvent> events, std::vector<cplx>& psi) {
        std::size_t next_event = 0;
        for (std::size_t gi = begin; gi < end; ++gi) {
            const PreparedOp& op = ops[gi];
            if (op.arity == 1) {
                fold(op.q0, op.m1);
            } else {
                flush(op.q0, psi);
                flush(op.q1, psi);
                apply_prepared_2q(psi, op);
            }
            while (next_event < events.size() && events[next_event].gate == gi) {
                const int code = events[next_event].code;
                if (op.arity == 1) {
                    fold(op.q0, paulis()[static_cast<std::size_t>(code)]);
                } else {
                    if (code / 4 != 0) fold(op.q0, paulis()[static_cast<std::size_t>(code / 4)]);
                    if (code % 4 != 0) fold(op.q1, paulis()[static_cast<std::size_t>(code % 4)]);
                }
                ++next_event;
            }
        }
    }

    void flush_all(std::vector<cplx>& psi) {
        for (int q = 0; q < n_; ++q) flush(q, psi);
    }

private:
    void flush(int q, std::vector<cplx>& psi) {
        const auto qi = static_cast<std::size_t>(q);
        if (!dirty_[qi]) return;
        apply_1q(psi, q, pending_[qi]);
        pending_[qi] = kIdentity2;
        dirty_[qi] = false;
    }

    int n_;
    std::vector<Mat2> pending_;
    std::vector<bool> dirty_;
};

void check_size(const Circuit& c) {
    if (c.n_qubits() > kMaxQubits) {
        throw Error(ErrorCode::TooManyQubits,
                    std::to_string(c.n_qubits()) + " qubits exceeds simulator cap of " + std::to_string(kMaxQubits));
    }
}

std::vector<int> measured_qubits(const Circuit& c) {
    if (!c.measured().empty()) return c.measured();
    std::vector<int> all(static_cast<std::size_t>(c.n_qubits()));
    for (int q = 0; q < c.n_qubits(); ++q) all[static_cast<std::size_t>(q)] = q;
    return all;
}

std::uint64_t project(std::size_t index, const std::vector<int>& measured) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < measured.size(); ++i)
        if (index >> measured[i] & 1u) key |= std::uint64_t{1} << i;
    return key;
}

std::vector<cplx> zero_state(int n) {
    std::vector<cplx> psi(std::size_t{1} << n);
    psi[0] = 1.0;
    return psi;
}

}  // namespace

void NoiseModel::validate() const {
    auto in_unit = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (!in_unit(p1) || !in_unit(p2) || !in_unit(p_read)) {
        throw Error(ErrorCode::InvalidConfig, "noise probabilities must lie in [0, 1]");
    }
    if (!std::isfinite(overrotation)) throw Error(ErrorCode::InvalidConfig, "overrotation must be finite");
}

std::string format_outcome(std::uint64_t key, std::size_t n_bits, BitOrder order) {
    std::string s(n_bits, '0');
    for (std::size_t i = 0; i < n_bits; ++i) {
        if (key >> i & 1u) {
            const std::size_t pos = order == BitOrder::QubitZeroFirst ? i : n_bits - 1 - i;
            s[pos] = '1';
        }
    }
    return s;
}

std::uint64_t OutcomeCounts::count(const std::string& bits) const {
    const auto it = counts.find(bits);
    return it == counts.end() ? 0 : it->second;
}

StateVector run_statevector(const Circuit& c) {
    check_size(c);
    return run_statevector(c, StateVector::basis(c.n_qubits()));
}

StateVector run_statevector(const Circuit& c, const StateVector& input) {
    check_size(c);
    if (input.dimension() != (std::size_t{1} << c.n_qubits())) {
        throw Error(ErrorCode::DimensionMismatch, "input state dimension does not match circuit register");
    }
    std::vector<cplx> psi(input.amplitudes().begin(), input.amplitudes().end());
    for (const Gate& g : c.ops()) {
        const ComplexMatrix m = gate_matrix(g);
        if (g.arity() == 1) {
            apply_1q(psi, g.qubits[0], to_mat2(m));
        } else {
            apply_2q(psi, g.qubits[0], g.qubits[1], to_mat4(m));
        }
    }
    return StateVector(std::move(psi));
}

ComplexMatrix circuit_unitary(const Circuit& c) {
    if (c.n_qubits() > 10) throw Error(ErrorCode::TooManyQubits, "circuit_unitary is limited to 10 qubits");
    const std::size_t dim = std::size_t{1} << c.n_qubits();
    ComplexMatrix u(dim, dim);
    for (std::size_t col = 0; col < dim; ++col) {
        const auto out = run_statevector(c, StateVector::basis(c.n_qubits(), col));
        for (std::size_t r = 0; r < dim; ++r) u(r, col) = out[r];
    }
    return u;
}

std::map<std::string, double> exact_distribution(const Circuit& c, BitOrder order) {
    check_size(c);
    const auto psi = run_statevector(c);
    const auto measured = measured_qubits(c);
    std::map<std::uint64_t, double> by_key;
    for (std::size_t i = 0; i < psi.dimension(); ++i) {
        const double p = std::norm(psi[i]);
        if (p > 0.0) by_key[project(i, measured)] += p;
    }
    std::map<std::string, double> out;
    for (const auto& [key, p] : by_key)
        if (p > 1e-15) out[format_outcome(key, measured.size(), order)] = p;
    return out;
}

std::vector<std::uint64_t> sample_shots(const Circuit& c, std::uint64_t shots, const NoiseModel& noise,
                                        std::uint64_t seed) {
    check_size(c);
    noise.validate();
    if (shots == 0) throw Error(ErrorCode::InvalidConfig, "shots must be at least 1");

    const int n = c.n_qubits();
    const auto measured = measured_qubits(c);
    const auto ops = prepare(c, noise.overrotation);

    // Ops before `first_nc` and after `last_nc` are Clifford: errors there are
    // pushed through as a Pauli frame instead of being simulated.
    std::size_t first_nc = ops.size();
    std::size_t suffix = 0;
    for (std::size_t gi = 0; gi < ops.size(); ++gi) {
        if (ops[gi].clifford) continue;
        first_nc = std::min(first_nc, gi);
        suffix = gi + 1;
    }

    // Shots without a Pauli event all share this distribution.
    std::vector<std::uint64_t> ideal_keys;
    std::vector<double> ideal_cdf;
    std::vector<cplx> snapshot;
    {
        std::vector<cplx> psi = zero_state(n);
        FusedRunner runner(n);
        runner.run(ops, 0, first_nc, {}, psi);
        runner.flush_all(psi);
        if (first_nc < ops.size()) snapshot = psi;
        runner.run(ops, first_nc, ops.size(), {}, psi);
        runner.flush_all(psi);
        std::map<std::uint64_t, double> by_key;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double p = std::norm(psi[i]);
            if (p > 0.0) by_key[project(i, measured)] += p;
        }
        double acc = 0.0;
        for (const auto& [key, p] : by_key) {
            acc += p;
            ideal_keys.push_back(key);
            ideal_cdf.push_back(acc);
        }
    }
    auto sample_ideal = [&](double u) {
        const double target = u * ideal_cdf.back();
        const auto it = std::upper_bound(ideal_cdf.begin(), ideal_cdf.end(), target);
        const auto idx =
            std::min<std::size_t>(static_cast<std::size_t>(it - ideal_cdf.begin()), ideal_keys.size() - 1);
        return ideal_keys[idx];
    };

    std::vector<std::uint64_t> out(shots);
    auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        FusedRunner runner(n);
        std::vector<cplx> psi;
        std::vector<PauliEvent> events;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (std::uint64_t s = begin; s < end; ++s) {
            std::mt19937_64 rng(derive_seed(seed, {s}));
            events.clear();
            for (std::size_t gi = 0; gi < ops.size(); ++gi) {
                const bool two = ops[gi].arity == 2;
                const double p = two ? noise.p2 : noise.p1;
                if (p <= 0.0) continue;
                if (unif(rng) < p) {
                    const int choices = two ? 15 : 3;
                    const int pick = std::min(choices - 1, static_cast<int>(unif(rng) * choices));
                    events.push_back({gi, pick + 1});
                }
            }
            std::uint64_t key = 0;
            const double u = unif(rng);
            if (events.empty()) {
                key = sample_ideal(u);
            } else if (events.front().gate >= suffix) {
                // Every error sits in the Clifford tail: only its X part survives
                // to the measurement.
                Frame frame;
                std::size_t e = 0;
                for (std::size_t gi = events.front().gate; gi < ops.size(); ++gi) {
                    frame.conjugate(ops[gi]);
                    for (; e < events.size() && events[e].gate == gi; ++e) frame.multiply(ops[gi], events[e].code);
                }
                key = sample_ideal(u) ^ project(frame.x, measured);
            } else {
                // Errors in the Clifford head collapse to one Pauli in front of
                // the first non-Clifford op.
                Frame frame;
                std::size_t e = 0;
                for (std::size_t gi = events.front().gate; gi < first_nc; ++gi) {
                    frame.conjugate(ops[gi]);
                    for (; e < events.size() && events[e].gate == gi; ++e) frame.multiply(ops[gi], events[e].code);
                }
                psi = snapshot;
                for (int q = 0; q < n; ++q) {
                    const int code = bits_code(frame.local(q));
                    if (code != 0) runner.fold(q, paulis()[static_cast<std::size_t>(code)]);
                }
                runner.run(ops, first_nc, ops.size(), std::span(events).subspan(e), psi);
                runner.flush_all(psi);
                double total = 0.0;
                for (const auto& a : psi) total += std::norm(a);
                const double target = u * total;
                double acc = 0.0;
                std::size_t chosen = psi.size() - 1;
                for (std::size_t i = 0; i < psi.size(); ++i) {
                    acc += std::norm(psi[i]);
                    if (acc > target) {
                        chosen = i;
                        break;
                    }
                }
                key = project(chosen, measured);
            }
            if (noise.p_read > 0.0) {
                for (std::size_t b = 0; b < measured.size(); ++b)
                    if (unif(rng) < noise.p_read) key ^= std::uint64_t{1} << b;
            }
            out[s] = key;
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t n_workers = std::min<std::uint64_t>(hw, std::max<std::uint64_t>(1, shots / 256));
    if (n_workers <= 1) {
        worker(0, shots);
    } else {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (shots + n_workers - 1) / n_workers;
        for (std::uint64_t w = 0; w < n_workers; ++w) {
            const std::uint64_t begin = w * chunk;
            const std::uint64_t end = std::min(shots, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
    }
    return out;
}

OutcomeCounts sample_counts(const Circuit& c, std::uint64_t shots, const NoiseModel& noise, std::uint64_t seed,
                            BitOrder order) {
    const auto keys = sample_shots(c, shots, noise, seed);
    const std::size_t n_bits = measured_qubits(c).size();
    std::map<std::uint64_t, std::uint64_t> by_key;
    for (auto k : keys) ++by_key[k];
    OutcomeCounts out;
    out.shots = shots;
    out.seed = seed;
    for (const auto& [key, n] : by_key) out.counts[format_outcome(key, n_bits, order)] += n;
    return out;
}

}  // namespace udisc
