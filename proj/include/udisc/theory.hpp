#pragma once

#include <cstdint>
#include <optional>

#include "udisc/linalg.hpp"

namespace udisc {

/// Two unitaries of the same dimension, validated at construction.
class UnitaryPair {
public:
    UnitaryPair(ComplexMatrix u, ComplexMatrix v);

    const ComplexMatrix& u() const noexcept { return u_; }
    const ComplexMatrix& v() const noexcept { return v_; }

    /// V†U, whose eigenvalue spread decides distinguishability.
    ComplexMatrix relative() const { return v_.adjoint() * u_; }

private:
    ComplexMatrix u_;
    ComplexMatrix v_;
};

struct DiscriminationReport {
    double theta = 0.0;
    double nu = 1.0;
    double diamond = 0.0;
    double p_succ_bound = 0.5;
    std::optional<std::uint64_t> min_copies;  // nullopt: no finite number of copies suffices
};

/// Length of the smallest arc of the unit circle holding every eigenvalue of
/// `u`: 2π minus the largest circular gap between sorted eigenphases. Arcs
/// below `tol` are reported as exactly 0.
double arc_function(const ComplexMatrix& u, double tol = kDefaultTol);

/// cos(θ/2) for θ < π, else 0.
double nu_from_arc(double theta);

double nu_min_modulus(const UnitaryPair& pair);

/// Independent estimate of min |⟨x|M|x⟩| over unit x: Haar-random probes plus
/// the best two-point mixture along every pair of eigenvectors. Deterministic
/// for a given seed.
double numerical_range_min_bruteforce(const ComplexMatrix& m, std::size_t samples,
                                      std::uint64_t seed);

DiscriminationReport report_from_arc(double theta);

DiscriminationReport discrimination_report(const UnitaryPair& pair);

/// Optimal success probability with n uses of a pair whose single-use arc is
/// `theta`, valid under n·θ < 2π; exactly 1 once n·θ reaches π.
double optimal_success_n_copies(double theta, std::uint64_t n);

/// Unit vector ψ with ⟨ψ|M|ψ⟩ = 0, built from at most three eigenvectors of M.
/// `lambda` is the unit scalar on the second eigenvector of an antipodal pair.
StateVector discriminator_state(const ComplexMatrix& m, double tol = kDefaultTol,
                                cplx lambda = 1.0);

/// 1/2 + 1/2·sqrt(1 − |⟨ψ0|ψ1⟩|²).
double helstrom_pair_success(const StateVector& psi0, const StateVector& psi1);

}  // namespace udisc
