#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "udisc/scheme.hpp"
#include "udisc/simulator.hpp"

namespace udisc {

enum class Verdict { H0, H1, Tie };
enum class RuleKind { OutcomeSets, Parity, MajorityBits };

/// Maps bitstrings (qubit-0-first) to a verdict.
///   OutcomeSets : membership; strings in neither set go to the set holding the
///                 nearest string in Hamming distance, Tie when equidistant.
///   Parity      : even parity is H0.
///   MajorityBits: more zeros is H0, more ones is H1, equal counts tie.
class ClassificationRule {
public:
    static ClassificationRule outcome_sets(std::set<std::string> set0, std::set<std::string> set1);
    static ClassificationRule parity(std::size_t n_bits);
    static ClassificationRule majority_bits(std::size_t n_bits);

    RuleKind kind() const noexcept { return kind_; }
    std::size_t arity() const noexcept { return arity_; }
    const std::set<std::string>& set0() const noexcept { return set0_; }
    const std::set<std::string>& set1() const noexcept { return set1_; }

    Verdict decide(std::string_view bits) const;

private:
    RuleKind kind_ = RuleKind::Parity;
    std::size_t arity_ = 0;
    std::set<std::string> set0_;
    std::set<std::string> set1_;
};

/// Seeded coin for ties. Each coin consumes exactly one 64-bit draw.
class TieBreaker {
public:
    explicit TieBreaker(std::uint64_t seed) : gen_(seed) {}

    Hypothesis coin();
    std::uint64_t draws() const noexcept { return draws_; }

private:
    std::mt19937_64 gen_;
    std::uint64_t draws_ = 0;
};

Hypothesis classify(std::string_view bits, const ClassificationRule& rule, TieBreaker& ties);

/// H0 when it holds a strict majority, H1 when H1 does, otherwise a coin.
Hypothesis majority_vote(std::span<const Hypothesis> labels, TieBreaker& ties);

/// Probability that a majority vote over w independent guesses, each right
/// with probability p, is right (even-w ties broken by a fair coin).
double majority_success_closed_form(int w, double p_single);

struct SuccessEstimate {
    double p_succ = 0.0;
    std::uint64_t shots = 0;  // per hypothesis
    std::uint64_t ties = 0;
    double theoretical_bound = 1.0;
    bool swapped = false;
};

/// Equal-prior success rate over every shot of both runs. Shots are visited in
/// outcome-key order, H0 run first; each tie draws one coin.
SuccessEstimate estimate_success(const OutcomeCounts& h0, const OutcomeCounts& h1,
                                 const ClassificationRule& rule, TieBreaker& ties,
                                 double theoretical_bound = 1.0);

/// Estimates below 1/2 become 1 − p and are flagged as swapped.
std::vector<SuccessEstimate> answer_swap_correction(std::vector<SuccessEstimate> estimates);

/// Rule matching a scheme's measurement. Short uses the supports of the
/// noiseless outcome distributions of both hypotheses.
ClassificationRule rule_for_scheme(const SchemeSpec& spec);

}  // namespace udisc
