#include "udisc/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "udisc/error.hpp"

namespace udisc {

namespace {

constexpr double kPairTol = 1e-10;

// Barycentric weights of the origin inside triangle (a, b, c).
std::optional<std::array<double, 3>> origin_weights(cplx a, cplx b, cplx c) {
    const double det = (b.real() - a.real()) * (c.imag() - a.imag()) -
                       (c.real() - a.real()) * (b.imag() - a.imag());
    if (std::abs(det) < 1e-14) return std::nullopt;
    const double wb = ((-a.real()) * (c.imag() - a.imag()) - (c.real() - a.real()) * (-a.imag())) / det;
    const double wc = ((b.real() - a.real()) * (-a.imag()) - (-a.real()) * (b.imag() - a.imag())) / det;
    const double wa = 1.0 - wb - wc;
    return std::array<double, 3>{wa, wb, wc};
}

}  // namespace

UnitaryPair::UnitaryPair(ComplexMatrix u, ComplexMatrix v) : u_(std::move(u)), v_(std::move(v)) {
    if (!u_.is_square() || !v_.is_square() || u_.empty()) {
        throw Error(ErrorCode::NonSquare, "unitary pair members must be square");
    }
    if (u_.rows() != v_.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "unitary pair members differ in dimension");
    }
    if (!is_unitary(u_, kPairTol) || !is_unitary(v_, kPairTol)) {
        throw Error(ErrorCode::NotUnitary, "unitary pair member fails unitarity check at 1e-10");
    }
}

double arc_function(const ComplexMatrix& u, double tol) {
    const auto phases = eigenphases_unitary(u, tol);
    if (phases.size() < 2) return 0.0;
    double largest_gap = kTwoPi - (phases.back() - phases.front());
    for (std::size_t i = 1; i < phases.size(); ++i)
        largest_gap = std::max(largest_gap, phases[i] - phases[i - 1]);
    const double theta = kTwoPi - largest_gap;
    return theta <= tol ? 0.0 : theta;
}

double nu_from_arc(double theta) { return theta < kPi ? std::cos(theta / 2.0) : 0.0; }

double nu_min_modulus(const UnitaryPair& pair) { return nu_from_arc(arc_function(pair.relative())); }

double numerical_range_min_bruteforce(const ComplexMatrix& m, std::size_t samples,
                                      std::uint64_t seed) {
    if (!m.is_square() || m.empty()) {
        throw Error(ErrorCode::NonSquare, "numerical range needs a square matrix");
    }
    const std::size_t n = m.rows();
    auto quadratic_form = [&](const std::vector<cplx>& x) {
        const auto mx = m.apply(x);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * mx[i];
        return std::abs(acc);
    };

    double best = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> x(n);
    for (std::size_t s = 0; s < samples; ++s) {
        double norm2 = 0.0;
        for (auto& xi : x) {
            xi = cplx(gauss(rng), gauss(rng));
            norm2 += std::norm(xi);
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& xi : x) xi *= inv;
        best = std::min(best, quadratic_form(x));
    }

    // General-purpose eigensolver, deliberately not the Schur path used by
    // the closed-form code.
    Eigen::MatrixXcd em(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            em(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(em);
    if (solver.info() != Eigen::Success) return best;
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();

    auto mixture = [&](Eigen::Index i, Eigen::Index j, double t) {
        std::vector<cplx> y(n);
        double norm2 = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const auto rr = static_cast<Eigen::Index>(r);
            y[r] = std::sqrt(t) * vecs(rr, i) + std::sqrt(1.0 - t) * vecs(rr, j);
            norm2 += std::norm(y[r]);
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& yi : y) yi *= inv;
        return quadratic_form(y);
    };

    const auto count = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = 0; i < count; ++i) {
        best = std::min(best, mixture(i, i, 1.0));
        for (Eigen::Index j = i + 1; j < count; ++j) {
            const cplx edge = vals(i) - vals(j);
            double t_star = 0.0;
            if (std::norm(edge) > 0.0) {
                t_star = std::clamp(-(std::conj(edge) * vals(j)).real() / std::norm(edge), 0.0, 1.0);
            }
            best = std::min(best, mixture(i, j, t_star));
            constexpr int kGrid = 200;
            for (int g = 0; g <= kGrid; ++g) best = std::min(best, mixture(i, j, double(g) / kGrid));
        }
    }
    return best;
}

DiscriminationReport report_from_arc(double theta) {
    DiscriminationReport r;
    r.theta = theta;
    r.nu = nu_from_arc(theta);
    r.diamond = 2.0 * std::sqrt(std::max(0.0, 1.0 - r.nu * r.nu));
    r.p_succ_bound = 0.5 + r.diamond / 4.0;
    if (theta > 0.0) {
        // The slack absorbs rounding when θ is an exact fraction π/N.
        const double ratio = kPi / theta;
        r.min_copies = static_cast<std::uint64_t>(std::ceil(ratio - 1e-9));
    }
    return r;
}

DiscriminationReport discrimination_report(const UnitaryPair& pair) {
    return report_from_arc(arc_function(pair.relative()));
}

double optimal_success_n_copies(double theta, std::uint64_t n) {
    const double total = theta * static_cast<double>(n);
    if (total >= kPi - 1e-9) return 1.0;
    return 0.5 + 0.5 * std::sin(total / 2.0);
}

StateVector discriminator_state(const ComplexMatrix& m, double tol, cplx lambda) {
    const auto eig = eigensystem_unitary(m, tol);
    const std::size_t n = eig.phases.size();
    const double theta = arc_function(m, tol);
    if (theta < kPi - tol) {
        throw Error(ErrorCode::NoZeroInHull,
                    "arc " + std::to_string(theta) + " < pi: zero is not in the numerical range");
    }
    std::vector<cplx> values(n);
    for (std::size_t k = 0; k < n; ++k) values[k] = std::polar(1.0, eig.phases[k]);

    auto column = [&](std::size_t k, std::size_t r) { return eig.vectors(r, k); };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(values[i] + values[j]) <= 2.0 * tol) {
                std::vector<cplx> psi(n);
                for (std::size_t r = 0; r < n; ++r)
                    psi[r] = (column(i, r) + lambda * column(j, r)) / std::sqrt(2.0);
                return StateVector(std::move(psi));
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const auto w = origin_weights(values[i], values[j], values[k]);
                if (!w) continue;
                if ((*w)[0] < -1e-12 || (*w)[1] < -1e-12 || (*w)[2] < -1e-12) continue;
                std::array<double, 3> p{std::max(0.0, (*w)[0]), std::max(0.0, (*w)[1]),
                                        std::max(0.0, (*w)[2])};
                const double total = p[0] + p[1] + p[2];
                std::vector<cplx> psi(n);
                const std::array<std::size_t, 3> idx{i, j, k};
                for (std::size_t r = 0; r < n; ++r)
                    for (int t = 0; t < 3; ++t) psi[r] += std::sqrt(p[t] / total) * column(idx[t], r);
                StateVector out(std::move(psi));
                const auto mpsi = m.apply(out.amplitudes());
                cplx expect = 0.0;
                for (std::size_t r = 0; r < n; ++r) expect += std::conj(out[r]) * mpsi[r];
                if (std::abs(expect) <= 10.0 * tol) return out;
            }

    throw Error(ErrorCode::NoZeroInHull, "no eigenvalue pair or triple encloses the origin");
}

double helstrom_pair_success(const StateVector& psi0, const StateVector& psi1) {
    const double overlap = std::min(1.0, std::abs(psi0.inner(psi1)));
    return 0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
}

}  // namespace udisc
