#include "xbn/explain_evidence.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "xbn/error.hpp"
#include "xbn/inference.hpp"

namespace xbn {

std::string_view to_string(ScoreKind k) {
    return k == ScoreKind::Gbf ? "gbf" : "joint_posterior";
}

Explanation mpe(const BayesianNetwork& net, const Evidence& evidence) {
    if (evidence.size() >= net.size()) throw UsageError("MPE needs at least one unobserved variable");
    MaxAssignment best = max_joint_assignment(net, evidence);
    Explanation out;
    out.assignment = std::move(best.assignment);
    out.score = best.joint;
    out.posterior = best.joint / evidence_probability(net, evidence);
    return out;
}

Explanation map_query(const BayesianNetwork& net, const std::vector<VarId>& targets,
                      const Evidence& evidence) {
    if (targets.empty()) throw UsageError("MAP requires at least one target");
    std::size_t space = 1;
    for (VarId t : targets) {
        if (t >= net.size()) throw UsageError("unknown target variable");
        space *= net.cardinality(t);
        if (space > kMapSearchLimit) throw GuardExceededError("MAP search space too large");
    }
    Factor joint = joint_with_evidence(net, targets, evidence);
    const double pe = joint.total();
    if (!(pe > 0.0)) throw ImpossibleEvidenceError();

    const auto& values = joint.values();
    const std::size_t best = std::max_element(values.begin(), values.end()) - values.begin();
    Explanation out;
    std::size_t rest = best;
    for (std::size_t i = joint.scope().size(); i-- > 0;) {
        out.assignment.set(joint.scope()[i], rest % joint.cards()[i]);
        rest /= joint.cards()[i];
    }
    out.score = values[best] / pe;
    out.posterior = out.score;
    return out;
}

namespace {

// P(e, not x) below this fraction of P(e) is treated as zero.
constexpr double kVanishingFraction = 1e-14;
// P(x) within this of 1 makes "not x" impossible.
constexpr double kVacuousMargin = 1e-12;
// Relative slack when deciding that a subset scores at least as high.
constexpr double kDominanceSlack = 1e-9;

enum class GbfStatus { Ok, Impossible, Vacuous };

GbfStatus gbf_from(double px, double pxe, double pe, double& out) {
    if (!(px > 0.0)) return GbfStatus::Impossible;
    if (1.0 - px <= kVacuousMargin) return GbfStatus::Vacuous;
    const double pe_not_x = pe - pxe;
    if (pe_not_x <= kVanishingFraction * pe) {
        out = kInfiniteGbf;
    } else {
        out = (pxe / px) / (pe_not_x / (1.0 - px));
    }
    return GbfStatus::Ok;
}

// Rounds away the last few mantissa bits so nearly-equal scores tie.
double rank_key(double score) {
    if (!std::isfinite(score) || score == 0.0) return score;
    int exp = 0;
    double m = std::frexp(score, &exp);
    return std::ldexp(std::round(std::ldexp(m, 40)), exp - 40);
}

}  // namespace

double gbf(const BayesianNetwork& net, const PartialInstantiation& x, const Evidence& evidence) {
    if (x.empty()) throw UsageError("explanation must be nonempty");
    check_assignment(net, x);
    for (VarId v : x.variables())
        if (evidence.contains(v))
            throw UsageError("explanation variable '" + net.variable(v).name + "' is observed");
    const double pe = evidence_probability(net, evidence);
    if (!(pe > 0.0)) throw ImpossibleEvidenceError();
    const double px = evidence_probability(net, x);
    const double pxe = evidence_probability(net, x.merged(evidence));
    double out = 0.0;
    switch (gbf_from(px, pxe, pe, out)) {
        case GbfStatus::Impossible: throw DegenerateExplanationError("impossible explanation: P(x) = 0");
        case GbfStatus::Vacuous:
            throw DegenerateExplanationError("vacuous explanation: P(x) = 1, so not-x is impossible");
        case GbfStatus::Ok: break;
    }
    return out;
}

bool ranks_before(const Explanation& a, const Explanation& b) {
    const double ka = rank_key(a.score), kb = rank_key(b.score);
    if (ka != kb) return ka > kb;
    if (a.assignment.size() != b.assignment.size()) return a.assignment.size() < b.assignment.size();
    return a.assignment.entries() < b.assignment.entries();
}

ExplanationRanking mre(const BayesianNetwork& net, std::vector<VarId> target_set,
                       const Evidence& evidence, const MreOptions& options) {
    if (target_set.empty()) throw UsageError("MRE requires a nonempty target set");
    std::sort(target_set.begin(), target_set.end());
    const std::size_t n = target_set.size();

    // Mixed-radix code over the target set: digit 0 = absent, d = state d-1.
    // Last target varies fastest.
    std::vector<std::size_t> radix(n), weight(n);
    std::size_t codes = 1;
    for (std::size_t i = n; i-- > 0;) {
        if (target_set[i] >= net.size()) throw UsageError("unknown target variable");
        radix[i] = net.cardinality(target_set[i]) + 1;
        weight[i] = codes;
        if (codes > (kMreSearchLimit + 1) / radix[i])
            throw GuardExceededError("MRE search space too large (limit " +
                                     std::to_string(kMreSearchLimit) + " explanations)");
        codes *= radix[i];
    }

    Factor prior = joint_with_evidence(net, target_set, {});
    Factor joint = joint_with_evidence(net, target_set, evidence);
    const double pe = joint.total();
    if (!(pe > 0.0)) throw ImpossibleEvidenceError();

    // Extended tables: P(x) and P(x, e) for every partial instantiation,
    // obtained by summing each variable into its "absent" slot in turn.
    std::vector<double> px(codes, 0.0), pxe(codes, 0.0);
    {
        std::vector<StateId> states(n, 0);
        for (std::size_t i = 0; i < prior.size(); ++i) {
            std::size_t code = 0;
            for (std::size_t k = 0; k < n; ++k) code += (states[k] + 1) * weight[k];
            px[code] = prior.values()[i];
            pxe[code] = joint.values()[i];
            for (std::size_t k = n; k-- > 0;) {
                if (++states[k] < radix[k] - 1) break;
                states[k] = 0;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t block = radix[i] * weight[i];
        for (std::size_t hi = 0; hi < codes; hi += block)
            for (std::size_t lo = 0; lo < weight[i]; ++lo) {
                double sx = 0.0, sxe = 0.0;
                for (std::size_t d = 1; d < radix[i]; ++d) {
                    sx += px[hi + d * weight[i] + lo];
                    sxe += pxe[hi + d * weight[i] + lo];
                }
                px[hi + lo] = sx;
                pxe[hi + lo] = sxe;
            }
    }
    const double pe_total = pxe[0];

    // Reuse px for scores (-inf marks undefined) and pxe for the best score
    // over all subsets of each code.
    std::vector<double>& score = px;
    std::vector<double>& best_within = pxe;
    const double undefined = -std::numeric_limits<double>::infinity();
    std::size_t candidates = 0;
    for (std::size_t code = 1; code < codes; ++code) {
        double g = 0.0;
        if (gbf_from(px[code], pxe[code], pe_total, g) == GbfStatus::Ok) {
            score[code] = g;
            ++candidates;
        } else {
            score[code] = undefined;
        }
    }
    score[0] = undefined;

    auto decode = [&](std::size_t code) {
        Explanation e;
        e.score_kind = ScoreKind::Gbf;
        e.score = score[code];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t d = (code / weight[i]) % radix[i];
            if (d) e.assignment.set(target_set[i], d - 1);
        }
        return e;
    };

    auto worse = [](const Explanation& a, const Explanation& b) { return ranks_before(a, b); };
    std::priority_queue<Explanation, std::vector<Explanation>, decltype(worse)> top(worse);

    best_within[0] = undefined;
    for (std::size_t code = 1; code < codes; ++code) {
        double best_subset = undefined;
        std::size_t size = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t d = (code / weight[i]) % radix[i];
            if (!d) continue;
            ++size;
            best_subset = std::max(best_subset, best_within[code - d * weight[i]]);
        }
        const double g = score[code];
        best_within[code] = std::max(g, best_subset);
        if (g == undefined || options.k == 0) continue;
        // Singletons have no nonempty strict subset.
        if (options.prune_dominated && size > 1 && best_subset >= g * (1.0 - kDominanceSlack)) continue;

        if (top.size() < options.k) {
            top.push(decode(code));
        } else {
            Explanation e = decode(code);
            if (ranks_before(e, top.top())) {
                top.pop();
                top.push(std::move(e));
            }
        }
    }

    ExplanationRanking out;
    out.entries.resize(top.size());
    for (std::size_t i = top.size(); i-- > 0;) {
        out.entries[i] = top.top();
        top.pop();
    }
    out.evidence = evidence;
    out.target_set = std::move(target_set);
    out.candidates = candidates;
    return out;
}

}  // namespace xbn
