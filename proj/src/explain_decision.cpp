#include "xbn/explain_decision.hpp"

#include <algorithm>

#include "xbn/error.hpp"
#include "xbn/inference.hpp"

namespace xbn {

std::string_view to_string(Decision d) { return d == Decision::Positive ? "positive" : "negative"; }

namespace {

void check_hypothesis(const BayesianNetwork& net, Assignment::Entry hypothesis, double threshold,
                      const Evidence& evidence) {
    const auto [v, s] = hypothesis;
    if (v >= net.size() || s >= net.cardinality(v)) throw UsageError("invalid hypothesis state");
    if (evidence.contains(v))
        throw UsageError("hypothesis variable '" + net.variable(v).name + "' is observed");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw UsageError("threshold must lie in [0, 1]");
}

}  // namespace

DecisionOutcome decide(const BayesianNetwork& net, Assignment::Entry hypothesis, double threshold,
                       const Evidence& evidence) {
    check_hypothesis(net, hypothesis, threshold, evidence);
    DecisionOutcome out;
    out.threshold = threshold;
    out.posterior =
        posterior(net, {hypothesis.first}, evidence).probability(hypothesis.first, hypothesis.second);
    out.decision = decide_rule(out.posterior, threshold);
    return out;
}

SdpResult sdp(const BayesianNetwork& net, const DecisionSpec& spec) {
    check_hypothesis(net, spec.hypothesis, spec.threshold, spec.evidence);
    const VarId hyp = spec.hypothesis.first;
    std::vector<VarId> hidden = spec.hidden;
    std::sort(hidden.begin(), hidden.end());
    std::size_t branches = 1;
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        const VarId h = hidden[i];
        if (h >= net.size()) throw UsageError("unknown hidden variable");
        if (h == hyp) throw UsageError("hidden set must not contain the hypothesis variable");
        if (spec.evidence.contains(h))
            throw UsageError("hidden variable '" + net.variable(h).name + "' is observed");
        if (i > 0 && hidden[i - 1] == h)
            throw UsageError("hidden variable '" + net.variable(h).name + "' listed twice");
        branches *= net.cardinality(h);
        if (branches > kSdpBranchLimit)
            throw GuardExceededError("SDP enumeration exceeds " + std::to_string(kSdpBranchLimit) +
                                     " hidden-variable branches");
    }

    // One elimination pass yields P(hyp, h, e) for every branch at once.
    std::vector<VarId> targets = hidden;
    targets.push_back(hyp);
    Factor joint = joint_with_evidence(net, targets, spec.evidence);
    const double pe = joint.total();
    if (!(pe > 0.0)) throw ImpossibleEvidenceError();

    SdpResult out;
    out.baseline.threshold = spec.threshold;
    {
        VarId keep[] = {hyp};
        out.baseline.posterior = joint.marginal(keep).values()[spec.hypothesis.second] / pe;
        out.baseline.decision = decide_rule(out.baseline.posterior, spec.threshold);
    }

    // Position of the hypothesis in the sorted joint scope.
    const auto& scope = joint.scope();
    const std::size_t hyp_pos = std::find(scope.begin(), scope.end(), hyp) - scope.begin();
    std::vector<StateId> states(scope.size(), 0);
    std::vector<StateId> hidden_states(hidden.size(), 0);

    out.branches.reserve(branches);
    out.sdp = 0.0;
    for (std::size_t b = 0; b < branches; ++b) {
        SdpBranch branch;
        std::size_t k = 0;
        for (std::size_t i = 0; i < scope.size(); ++i)
            if (i != hyp_pos) {
                states[i] = hidden_states[k];
                branch.hidden.set(hidden[k], hidden_states[k]);
                ++k;
            }
        double mass = 0.0, hyp_mass = 0.0;
        for (StateId s = 0; s < net.cardinality(hyp); ++s) {
            states[hyp_pos] = s;
            const double p = joint.at(states);
            mass += p;
            if (s == spec.hypothesis.second) hyp_mass = p;
        }
        branch.weight = mass / pe;
        if (mass > 0.0) {
            branch.posterior = hyp_mass / mass;
            branch.same_decision =
                decide_rule(branch.posterior, spec.threshold) == out.baseline.decision;
        }
        if (branch.same_decision) out.sdp += branch.weight;
        out.branches.push_back(std::move(branch));

        for (std::size_t i = hidden_states.size(); i-- > 0;) {
            if (++hidden_states[i] < net.cardinality(hidden[i])) break;
            hidden_states[i] = 0;
        }
    }
    out.sdp = std::clamp(out.sdp, 0.0, 1.0);
    return out;
}

}  // namespace xbn
