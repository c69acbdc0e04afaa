#pragma once

#include <vector>

#include "xbn/factor.hpp"
#include "xbn/model.hpp"

namespace xbn {

/// Normalized P(targets | evidence) together with P(evidence).
struct Posterior {
    std::vector<VarId> targets;  // sorted
    Factor distribution;         // over `targets`
    Evidence evidence;
    double evidence_probability = 0.0;

    /// Marginal of one target, indexed by state.
    std::vector<double> marginal(VarId v) const;
    double probability(VarId v, StateId s) const { return marginal(v).at(s); }
};

/// Chain-rule product of the CPT entries selected by `inst`.
double joint_probability(const BayesianNetwork& net, const Instantiation& inst);

/// Joint state-space limit for brute-force enumeration (25 binary variables).
inline constexpr std::size_t kEnumerationLimit = std::size_t{1} << 25;

/// Brute-force oracle: sums joint_probability over every completion of the
/// evidence. Returns the unnormalized factor over all unobserved variables;
/// its total is P(evidence). Throws GuardExceededError beyond kEnumerationLimit.
Factor enumerate_distribution(const BayesianNetwork& net, const Evidence& evidence);

/// Unnormalized P(targets, evidence) by variable elimination (min-fill
/// order, ties by declaration order). An empty target list yields a scalar
/// factor holding P(evidence).
Factor joint_with_evidence(const BayesianNetwork& net, std::vector<VarId> targets,
                           const Evidence& evidence);

double evidence_probability(const BayesianNetwork& net, const Evidence& evidence);

/// Throws ImpossibleEvidenceError when P(e) = 0 and UsageError when a
/// target is empty or observed.
Posterior posterior(const BayesianNetwork& net, std::vector<VarId> targets, const Evidence& evidence);

/// Max-product elimination over every unobserved variable. Returns the
/// maximizing completion and its joint probability P(x, e). Ties resolve
/// to the lowest state index.
struct MaxAssignment {
    Assignment assignment;
    double joint = 0.0;
};
MaxAssignment max_joint_assignment(const BayesianNetwork& net, const Evidence& evidence);

/// Active-trail test: true iff X and Y are d-separated given Z.
bool d_separated(const BayesianNetwork& net, const std::vector<VarId>& x,
                 const std::vector<VarId>& y, const std::vector<VarId>& z);

/// Greedy min-fill order for eliminating `vars` from the moral graph of
/// `factors`; ties broken by VarId.
std::vector<VarId> min_fill_order(const std::vector<Factor>& factors, std::vector<VarId> vars);

}  // namespace xbn
