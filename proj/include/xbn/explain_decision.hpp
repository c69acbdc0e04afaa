#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "xbn/model.hpp"

namespace xbn {

enum class Decision { Positive, Negative };
std::string_view to_string(Decision d);

/// Threshold decision on a hypothesis state. A posterior equal to the
/// threshold counts as positive.
struct DecisionSpec {
    Assignment::Entry hypothesis{};
    double threshold = 0.5;
    Evidence evidence;
    std::vector<VarId> hidden;
};

struct DecisionOutcome {
    double posterior = 0.0;
    double threshold = 0.0;
    Decision decision = Decision::Negative;
};

inline Decision decide_rule(double posterior, double threshold) {
    return posterior >= threshold ? Decision::Positive : Decision::Negative;
}

DecisionOutcome decide(const BayesianNetwork& net, Assignment::Entry hypothesis, double threshold,
                       const Evidence& evidence);

struct SdpBranch {
    Assignment hidden;
    double weight = 0.0;     // P(h | e)
    double posterior = 0.0;  // P(hypothesis | e, h); 0 for zero-weight branches
    bool same_decision = true;
};

struct SdpResult {
    double sdp = 1.0;
    DecisionOutcome baseline;
    std::vector<SdpBranch> branches;  // odometer order over hidden, last fastest
};

inline constexpr std::size_t kSdpBranchLimit = 1'000'000;

/// Same-decision probability: the posterior mass of hidden-variable
/// outcomes under which the threshold decision matches the baseline.
/// Zero-weight branches are kept in the table and flagged same-decision.
SdpResult sdp(const BayesianNetwork& net, const DecisionSpec& spec);

}  // namespace xbn
