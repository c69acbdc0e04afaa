#include "xbn/explain_reasoning.hpp"

#include <set>

#include "xbn/error.hpp"
#include "xbn/inference.hpp"

namespace xbn {

std::string_view to_string(ReasoningKind k) {
    switch (k) {
        case ReasoningKind::Predictive: return "predictive";
        case ReasoningKind::Diagnostic: return "diagnostic";
        case ReasoningKind::Intercausal: return "intercausal";
        case ReasoningKind::Mixed: return "mixed";
    }
    return "mixed";
}

std::string_view to_string(EvidenceRole r) {
    switch (r) {
        case EvidenceRole::Ancestor: return "ancestor";
        case EvidenceRole::Descendant: return "descendant";
        case EvidenceRole::CompetingCause: return "competing_cause";
        case EvidenceRole::CommonEffect: return "common_effect";
        case EvidenceRole::Other: return "other";
    }
    return "other";
}

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Increase: return "increase";
        case Direction::Decrease: return "decrease";
        case Direction::Unchanged: return "unchanged";
    }
    return "unchanged";
}

QueryClassification classify(const BayesianNetwork& net, VarId target, const Evidence& evidence) {
    check_assignment(net, evidence);
    if (target >= net.size()) throw UsageError("unknown target variable");
    if (evidence.contains(target))
        throw UsageError("target '" + net.variable(target).name + "' is observed");

    VarId self[] = {target};
    const std::vector<bool> target_anc = net.ancestors_of(self);
    const std::vector<bool> target_desc = net.descendants_of(target);

    QueryClassification out;
    std::set<VarId> witnesses;
    for (VarId e : evidence.variables()) {
        EvidenceRole role = EvidenceRole::Other;
        if (target_anc[e]) {
            role = EvidenceRole::Ancestor;
        } else if (target_desc[e]) {
            role = EvidenceRole::Descendant;
        } else {
            const std::vector<bool> e_desc = net.descendants_of(e);
            for (VarId o : evidence.variables())
                if (o != e && e_desc[o] && target_desc[o]) {
                    role = EvidenceRole::CompetingCause;
                    witnesses.insert(o);
                }
        }
        out.roles.emplace_back(e, role);
    }
    for (auto& [v, role] : out.roles)
        if (role == EvidenceRole::Descendant && witnesses.count(v)) role = EvidenceRole::CommonEffect;

    std::set<ReasoningKind> kinds;
    for (auto [v, role] : out.roles) {
        switch (role) {
            case EvidenceRole::Ancestor: kinds.insert(ReasoningKind::Predictive); break;
            case EvidenceRole::Descendant: kinds.insert(ReasoningKind::Diagnostic); break;
            case EvidenceRole::CompetingCause:
            case EvidenceRole::CommonEffect: kinds.insert(ReasoningKind::Intercausal); break;
            case EvidenceRole::Other: kinds.insert(ReasoningKind::Mixed); break;
        }
    }
    if (kinds.empty())
        out.kind = ReasoningKind::Predictive;
    else if (kinds.size() == 1)
        out.kind = *kinds.begin();
    else
        out.kind = ReasoningKind::Mixed;
    return out;
}

BeliefChangeReport belief_change(const BayesianNetwork& net, VarId variable, StateId state,
                                 const Evidence& evidence) {
    if (variable >= net.size() || state >= net.cardinality(variable))
        throw UsageError("invalid target state");
    BeliefChangeReport r;
    r.variable = variable;
    r.state = state;
    r.kind = classify_query(net, variable, evidence);
    r.prior = posterior(net, {variable}, {}).probability(variable, state);
    r.posterior = posterior(net, {variable}, evidence).probability(variable, state);
    r.magnitude = r.posterior - r.prior;
    if (r.magnitude > kBeliefChangeTolerance)
        r.direction = Direction::Increase;
    else if (r.magnitude < -kBeliefChangeTolerance)
        r.direction = Direction::Decrease;
    else
        r.direction = Direction::Unchanged;
    return r;
}

ExplainingAwayReport explaining_away(const BayesianNetwork& net, Assignment::Entry cause,
                                     Assignment::Entry competitor, const Evidence& effect_evidence) {
    if (effect_evidence.empty())
        throw UsageError("explaining away requires an observed effect");
    if (cause.first == competitor.first) throw UsageError("the two causes must be distinct variables");
    for (auto [v, s] : {cause, competitor}) {
        if (v >= net.size() || s >= net.cardinality(v)) throw UsageError("invalid cause state");
        if (effect_evidence.contains(v))
            throw UsageError("cause '" + net.variable(v).name + "' is already observed");
    }

    ExplainingAwayReport r;
    r.before = posterior(net, {cause.first}, effect_evidence).probability(cause.first, cause.second);
    Evidence extended = effect_evidence;
    extended.set(competitor.first, competitor.second);
    r.after = posterior(net, {cause.first}, extended).probability(cause.first, cause.second);
    r.active = r.after < r.before - kExplainingAwayMargin;
    return r;
}

}  // namespace xbn
