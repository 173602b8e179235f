#include "udisc/classification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "udisc/error.hpp"

namespace udisc {

namespace {

void check_bits(std::string_view bits) {
    if (bits.find_first_not_of("01") != std::string_view::npos) {
        throw Error(ErrorCode::InvalidSpec, "bitstring may only hold 0 and 1");
    }
}

std::size_t hamming(std::string_view a, std::string_view b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

std::size_t nearest(const std::set<std::string>& set, std::string_view bits) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& s : set) best = std::min(best, hamming(s, bits));
    return best;
}

}  // namespace

ClassificationRule ClassificationRule::outcome_sets(std::set<std::string> set0, std::set<std::string> set1) {
    if (set0.empty() || set1.empty()) throw Error(ErrorCode::EmptyInput, "outcome sets must be non-empty");
    const std::size_t n = set0.begin()->size();
    for (const auto* set : {&set0, &set1}) {
        for (const auto& s : *set) {
            check_bits(s);
            if (s.size() != n) throw Error(ErrorCode::LengthMismatch, "outcome strings differ in length");
        }
    }
    for (const auto& s : set0) {
        if (set1.contains(s)) throw Error(ErrorCode::InvalidSpec, "outcome sets overlap at " + s);
    }
    ClassificationRule r;
    r.kind_ = RuleKind::OutcomeSets;
    r.arity_ = n;
    r.set0_ = std::move(set0);
    r.set1_ = std::move(set1);
    return r;
}

ClassificationRule ClassificationRule::parity(std::size_t n_bits) {
    ClassificationRule r;
    r.kind_ = RuleKind::Parity;
    r.arity_ = n_bits;
    return r;
}

ClassificationRule ClassificationRule::majority_bits(std::size_t n_bits) {
    ClassificationRule r;
    r.kind_ = RuleKind::MajorityBits;
    r.arity_ = n_bits;
    return r;
}

Verdict ClassificationRule::decide(std::string_view bits) const {
    if (bits.size() != arity_) {
        throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(arity_) + " bits, got " +
                                                   std::to_string(bits.size()));
    }
    check_bits(bits);
    const auto ones = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), '1'));
    switch (kind_) {
        case RuleKind::Parity: return ones % 2 == 0 ? Verdict::H0 : Verdict::H1;
        case RuleKind::MajorityBits: {
            const std::size_t zeros = bits.size() - ones;
            if (zeros == ones) return Verdict::Tie;
            return zeros > ones ? Verdict::H0 : Verdict::H1;
        }
        case RuleKind::OutcomeSets: {
            const std::string key(bits);
            if (set0_.contains(key)) return Verdict::H0;
            if (set1_.contains(key)) return Verdict::H1;
            const std::size_t d0 = nearest(set0_, bits);
            const std::size_t d1 = nearest(set1_, bits);
            if (d0 == d1) return Verdict::Tie;
            return d0 < d1 ? Verdict::H0 : Verdict::H1;
        }
    }
    return Verdict::Tie;
}

Hypothesis TieBreaker::coin() {
    ++draws_;
    return (gen_() >> 63) == 0 ? Hypothesis::H0 : Hypothesis::H1;
}

Hypothesis classify(std::string_view bits, const ClassificationRule& rule, TieBreaker& ties) {
    switch (rule.decide(bits)) {
        case Verdict::H0: return Hypothesis::H0;
        case Verdict::H1: return Hypothesis::H1;
        case Verdict::Tie: break;
    }
    return ties.coin();
}

Hypothesis majority_vote(std::span<const Hypothesis> labels, TieBreaker& ties) {
    if (labels.empty()) throw Error(ErrorCode::EmptyInput, "majority vote over no labels");
    const auto k = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Hypothesis::H0));
    const std::size_t rest = labels.size() - k;
    if (k > rest) return Hypothesis::H0;
    if (k < rest) return Hypothesis::H1;
    return ties.coin();
}

double majority_success_closed_form(int w, double p) {
    if (w < 1) throw Error(ErrorCode::InvalidSpec, "majority over no voters");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidSpec, "p_single must lie in [0, 1]");
    auto term = [&](int k) {
        const double log_choose = std::lgamma(w + 1.0) - std::lgamma(k + 1.0) - std::lgamma(w - k + 1.0);
        double lt = log_choose;
        if (k > 0) lt += k * std::log(p);
        if (w - k > 0) lt += (w - k) * std::log1p(-p);
        return std::exp(lt);
    };
    double total = 0.0;
    for (int k = w / 2 + 1; k <= w; ++k) total += term(k);
    if (w % 2 == 0) total += 0.5 * term(w / 2);
    return std::clamp(total, 0.0, 1.0);
}

SuccessEstimate estimate_success(const OutcomeCounts& h0, const OutcomeCounts& h1, const ClassificationRule& rule,
                                 TieBreaker& ties, double theoretical_bound) {
    if (h0.shots != h1.shots) {
        throw Error(ErrorCode::ShotMismatch, "hypothesis runs have " + std::to_string(h0.shots) + " and " +
                                                 std::to_string(h1.shots) + " shots");
    }
    if (h0.shots == 0) throw Error(ErrorCode::EmptyInput, "no shots to classify");
    const std::uint64_t draws_before = ties.draws();
    std::uint64_t correct = 0;
    auto tally = [&](const OutcomeCounts& counts, Hypothesis truth) {
        for (const auto& [bits, n] : counts.counts) {
            const Verdict v = rule.decide(bits);
            if (v != Verdict::Tie) {
                const Hypothesis guess = v == Verdict::H0 ? Hypothesis::H0 : Hypothesis::H1;
                if (guess == truth) correct += n;
                continue;
            }
            for (std::uint64_t s = 0; s < n; ++s) correct += ties.coin() == truth;
        }
    };
    tally(h0, Hypothesis::H0);
    tally(h1, Hypothesis::H1);
    SuccessEstimate e;
    e.shots = h0.shots;
    e.p_succ = static_cast<double>(correct) / (2.0 * static_cast<double>(h0.shots));
    e.ties = ties.draws() - draws_before;
    e.theoretical_bound = theoretical_bound;
    return e;
}

std::vector<SuccessEstimate> answer_swap_correction(std::vector<SuccessEstimate> estimates) {
    for (auto& e : estimates) {
        if (e.p_succ < 0.5) {
            e.p_succ = 1.0 - e.p_succ;
            e.swapped = true;
        }
    }
    return estimates;
}

ClassificationRule rule_for_scheme(const SchemeSpec& spec) {
    const auto w = static_cast<std::size_t>(spec.width);
    switch (spec.measurement) {
        case MeasurementKind::Parity: return ClassificationRule::parity(w);
        case MeasurementKind::XOR: return ClassificationRule::majority_bits(w);
        case MeasurementKind::Short: break;
    }
    auto support = [&](Hypothesis h) {
        std::set<std::string> s;
        for (const auto& [bits, p] : exact_distribution(assemble_scheme(spec, h))) {
            if (p > 1e-9) s.insert(bits);
        }
        return s;
    };
    return ClassificationRule::outcome_sets(support(Hypothesis::H0), support(Hypothesis::H1));
}

}  // namespace udisc
