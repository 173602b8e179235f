#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"
#include "udisc/circuit.hpp"
#include "udisc/linalg.hpp"

using namespace udisc;
using testutil::random_unitary;

namespace {

const ComplexMatrix kZ{{1.0, 0.0}, {0.0, -1.0}};
const double kR = 1.0 / std::sqrt(2.0);
const ComplexMatrix kH{{kR, kR}, {kR, -kR}};

double phase_distance(double a, double b) {
    const double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

}  // namespace

TEST_CASE("kron of identities and diagonals") {
    CHECK(max_abs_diff(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4)) ==
          0.0);
    const std::vector<cplx> zz{1.0, -1.0, -1.0, 1.0};
    CHECK(max_abs_diff(kron(kZ, kZ), ComplexMatrix::diagonal(zz)) == 0.0);

    // Diagonal phases multiplied by hand: e^{∓iπ/12} pairs.
    const std::vector<cplx> expect{std::polar(1.0, -kPi / 6), 1.0, 1.0, std::polar(1.0, kPi / 6)};
    CHECK(max_abs_diff(kron(rz_matrix(kPi / 6), rz_matrix(kPi / 6)), ComplexMatrix::diagonal(expect)) < 1e-15);
}

TEST_CASE("kron layout for rectangular factors") {
    const ComplexMatrix a{{1.0, 2.0}};
    const ComplexMatrix b{{3.0}, {4.0}};
    const ComplexMatrix k = kron(a, b);
    REQUIRE(k.rows() == 2);
    REQUIRE(k.cols() == 2);
    CHECK(k(0, 0) == cplx(3.0));
    CHECK(k(0, 1) == cplx(6.0));
    CHECK(k(1, 0) == cplx(4.0));
    CHECK(k(1, 1) == cplx(8.0));
    CHECK_ERROR(kron(ComplexMatrix{}, a), ErrorCode::DimensionMismatch);
}

TEST_CASE("kron is associative on random unitaries") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_unitary(2, rng);
        const auto b = random_unitary(2, rng);
        const auto c = random_unitary(2, rng);
        CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) < 1e-12);
    }
}

TEST_CASE("kron_power matches repeated kron") {
    const auto m = rz_matrix(0.3);
    CHECK(max_abs_diff(kron_power(m, 3), kron(m, kron(m, m))) < 1e-15);
    CHECK_ERROR(kron_power(m, 0), ErrorCode::DimensionMismatch);
}

TEST_CASE("is_unitary") {
    CHECK(is_unitary(ComplexMatrix::identity(2), 1e-10));
    CHECK_FALSE(is_unitary(ComplexMatrix::identity(2) * cplx(2.0), 1e-10));
    const ComplexMatrix sx{{cplx(0.5, 0.5), cplx(0.5, -0.5)}, {cplx(0.5, -0.5), cplx(0.5, 0.5)}};
    CHECK(is_unitary(sx, 1e-12));
    CHECK_ERROR(is_unitary(ComplexMatrix(2, 3)), ErrorCode::NonSquare);
}

TEST_CASE("eigenphases of simple unitaries") {
    const auto rz = eigenphases_unitary(rz_matrix(kPi / 6));
    REQUIRE(rz.size() == 2);
    CHECK(rz[0] == doctest::Approx(kPi / 12).epsilon(1e-12));
    CHECK(rz[1] == doctest::Approx(kTwoPi - kPi / 12).epsilon(1e-12));

    const auto id = eigenphases_unitary(ComplexMatrix::identity(4));
    REQUIRE(id.size() == 4);
    for (double p : id) CHECK(phase_distance(p, 0.0) < 1e-12);

    // Characteristic polynomial of H: λ² − 1 = 0.
    const auto h = eigenphases_unitary(kH);
    REQUIRE(h.size() == 2);
    CHECK(phase_distance(h[0], 0.0) < 1e-12);
    CHECK(phase_distance(h[1], kPi) < 1e-12);

    CHECK_ERROR(eigenphases_unitary(ComplexMatrix::identity(2) * cplx(2.0)), ErrorCode::NotUnitary);
    CHECK_ERROR(eigenphases_unitary(ComplexMatrix(2, 3)), ErrorCode::NonSquare);
}

TEST_CASE("eigensystem reconstructs the matrix") {
    std::mt19937_64 rng(5);
    for (std::size_t dim : {2u, 3u, 8u, 16u, 64u}) {
        const auto u = random_unitary(dim, rng);
        const auto es = eigensystem_unitary(u);
        std::vector<cplx> d;
        for (double p : es.phases) d.push_back(std::polar(1.0, p));
        const auto back = es.vectors * ComplexMatrix::diagonal(d) * es.vectors.adjoint();
        CHECK(max_abs_diff(back, u) < 1e-9);
        CHECK(is_unitary(es.vectors, 1e-9));
        CHECK(std::is_sorted(es.phases.begin(), es.phases.end()));
    }
}

TEST_CASE("eigenvalue product equals determinant") {
    std::mt19937_64 rng(17);
    for (std::size_t dim = 2; dim <= 16; dim += 2) {
        const auto u = random_unitary(dim, rng);
        cplx prod = 1.0;
        for (double p : eigenphases_unitary(u)) prod *= std::polar(1.0, p);
        CHECK(std::abs(prod - determinant(u)) < 1e-8);
    }
}

TEST_CASE("eigenphases of a tensor product are pairwise sums") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_unitary(2, rng);
        const auto b = random_unitary(3, rng);
        std::vector<double> sums;
        for (double pa : eigenphases_unitary(a))
            for (double pb : eigenphases_unitary(b)) sums.push_back(wrap_phase(pa + pb));
        std::sort(sums.begin(), sums.end());
        const auto got = eigenphases_unitary(kron(a, b));
        REQUIRE(got.size() == sums.size());
        // Compare as multisets on the circle.
        std::vector<bool> used(sums.size(), false);
        for (double g : got) {
            bool matched = false;
            for (std::size_t i = 0; i < sums.size() && !matched; ++i) {
                if (!used[i] && phase_distance(g, sums[i]) < 1e-8) used[i] = matched = true;
            }
            CHECK(matched);
        }
    }
}

TEST_CASE("wrap_phase") {
    CHECK(wrap_phase(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(wrap_phase(kTwoPi) == doctest::Approx(0.0));
    CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - kTwoPi));
}

TEST_CASE("max_abs_diff_up_to_phase ignores a global phase") {
    const auto m = rz_matrix(0.7);
    CHECK(max_abs_diff_up_to_phase(m * std::polar(1.0, 1.3), m) < 1e-15);
    CHECK(max_abs_diff_up_to_phase(m, kH) > 0.1);
}

TEST_CASE("state vectors") {
    const StateVector s({kR, cplx(0.0, kR)});
    CHECK(s.n_qubits() == 1);
    CHECK(s.norm() == doctest::Approx(1.0));
    CHECK(s.overlap(StateVector::basis(1, 0)) == doctest::Approx(kR));
    CHECK(std::abs(s.inner(s) - 1.0) < 1e-15);
    CHECK_ERROR(StateVector({1.0, 1.0}), ErrorCode::InvalidState);
    CHECK_ERROR(StateVector(std::vector<cplx>{}), ErrorCode::InvalidState);
    CHECK_ERROR(StateVector({1.0, 0.0, 0.0}).n_qubits(), ErrorCode::DimensionMismatch);
    CHECK_ERROR(StateVector::basis(2, 4), ErrorCode::DimensionMismatch);
    CHECK_ERROR(s.inner(StateVector::basis(2)), ErrorCode::DimensionMismatch);
}

TEST_CASE("matrix arithmetic errors") {
    CHECK_ERROR(ComplexMatrix(2, 3) * ComplexMatrix(2, 3), ErrorCode::DimensionMismatch);
    CHECK_ERROR((ComplexMatrix{{1.0, 2.0}, {3.0}}), ErrorCode::DimensionMismatch);
    const auto p = kH.pow(2);
    CHECK(max_abs_diff(p, ComplexMatrix::identity(2)) < 1e-15);
}
