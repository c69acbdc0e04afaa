#pragma once

#include <string_view>
#include <vector>

#include "xbn/model.hpp"

namespace xbn {

enum class ReasoningKind { Predictive, Diagnostic, Intercausal, Mixed };

std::string_view to_string(ReasoningKind k);

/// How a single evidence variable relates to the query target.
enum class EvidenceRole {
    Ancestor,        // cause side: information flows along the arcs
    Descendant,      // effect side: information flows against the arcs
    CompetingCause,  // shares an observed common effect with the target
    CommonEffect,    // the observed effect witnessing a competing cause
    Other,
};

std::string_view to_string(EvidenceRole r);

struct QueryClassification {
    ReasoningKind kind = ReasoningKind::Predictive;
    std::vector<std::pair<VarId, EvidenceRole>> roles;  // one per evidence variable
};

/// Structure-only classification of P(target | evidence).
///
/// Every evidence variable is given a role. A variable that is neither
/// ancestor nor descendant of the target but has an observed common
/// descendant with it is a competing cause; the observed common
/// descendants it relies on are then part of the same intercausal pattern
/// rather than diagnostic evidence. The query is predictive, diagnostic or
/// intercausal when all roles agree; anything else is mixed. Empty evidence
/// is classified predictive.
QueryClassification classify(const BayesianNetwork& net, VarId target, const Evidence& evidence);

inline ReasoningKind classify_query(const BayesianNetwork& net, VarId target, const Evidence& evidence) {
    return classify(net, target, evidence).kind;
}

enum class Direction { Increase, Decrease, Unchanged };
std::string_view to_string(Direction d);

inline constexpr double kBeliefChangeTolerance = 1e-9;

struct BeliefChangeReport {
    VarId variable = 0;
    StateId state = 0;
    double prior = 0.0;
    double posterior = 0.0;
    double magnitude = 0.0;  // posterior - prior
    Direction direction = Direction::Unchanged;
    ReasoningKind kind = ReasoningKind::Predictive;
};

BeliefChangeReport belief_change(const BayesianNetwork& net, VarId variable, StateId state,
                                 const Evidence& evidence);

inline constexpr double kExplainingAwayMargin = 1e-12;

struct ExplainingAwayReport {
    double before = 0.0;  // P(cause | effect evidence)
    double after = 0.0;   // P(cause | effect evidence, competing cause)
    bool active = false;  // after < before - kExplainingAwayMargin
};

/// Compares belief in `cause` before and after confirming `competitor`,
/// given the observed effect evidence. Throws UsageError when
/// `effect_evidence` is empty or either cause is already observed.
ExplainingAwayReport explaining_away(const BayesianNetwork& net, Assignment::Entry cause,
                                     Assignment::Entry competitor, const Evidence& effect_evidence);

}  // namespace xbn
