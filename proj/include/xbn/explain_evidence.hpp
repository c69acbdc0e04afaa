#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "xbn/model.hpp"

namespace xbn {

enum class ScoreKind { JointPosterior, Gbf };
std::string_view to_string(ScoreKind k);

struct Explanation {
    PartialInstantiation assignment;
    /// MPE: P(x, e). MAP: P(x | e). MRE/GBF: the generalised Bayes factor,
    /// possibly +infinity.
    double score = 0.0;
    ScoreKind score_kind = ScoreKind::JointPosterior;
    /// P(x | e) for the joint-posterior kinds; unused for GBF.
    double posterior = 0.0;
};

/// Most probable explanation: the best completion of every unobserved variable.
Explanation mpe(const BayesianNetwork& net, const Evidence& evidence);

inline constexpr std::size_t kMapSearchLimit = 10'000'000;

/// Maximum a posteriori assignment of `targets`, other unobserved variables
/// summed out. Ties resolve to the lexicographically first assignment.
Explanation map_query(const BayesianNetwork& net, const std::vector<VarId>& targets,
                      const Evidence& evidence);

inline constexpr double kInfiniteGbf = std::numeric_limits<double>::infinity();

/// GBF(x; e) = P(e | x) / P(e | not x). Returns kInfiniteGbf when
/// P(e, not x) vanishes. Throws DegenerateExplanationError when P(x) is 0
/// ("impossible explanation") or 1 ("vacuous explanation").
double gbf(const BayesianNetwork& net, const PartialInstantiation& x, const Evidence& evidence);

inline constexpr std::size_t kMreSearchLimit = 10'000'000;

struct MreOptions {
    std::size_t k = 10;
    /// Drop x when some strict subset of x scores at least as high.
    bool prune_dominated = true;
};

struct ExplanationRanking {
    std::vector<Explanation> entries;  // best first
    Evidence evidence;
    std::vector<VarId> target_set;
    /// Number of partial instantiations with a defined GBF.
    std::size_t candidates = 0;
};

/// Exhaustive most-relevant-explanation search over every nonempty partial
/// instantiation of `target_set`. Order: GBF descending (+inf first), then
/// fewer variables, then lexicographic in declaration order. Throws
/// GuardExceededError when prod(|states| + 1) - 1 exceeds kMreSearchLimit.
ExplanationRanking mre(const BayesianNetwork& net, std::vector<VarId> target_set,
                       const Evidence& evidence, const MreOptions& options = {});

/// Strict ranking order used by mre (true when `a` ranks before `b`).
bool ranks_before(const Explanation& a, const Explanation& b);

}  // namespace xbn
