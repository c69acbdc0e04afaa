#include "xbn/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "xbn/error.hpp"

namespace xbn {

json assignment_to_json(const BayesianNetwork& net, const Assignment& a) {
    json out = json::object();
    for (auto [v, s] : a) out[net.variable(v).name] = net.variable(v).states[s];
    return out;
}

Assignment assignment_from_json(const BayesianNetwork& net, const json& j) {
    if (j.is_null()) return {};
    if (j.is_string()) return parse_assignment(net, j.get<std::string>());
    if (!j.is_object()) throw UsageError("expected an object of Var: state pairs");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string())
            throw UsageError("state for '" + it.key() + "' must be a string");
        pairs.emplace_back(it.key(), it.value().get<std::string>());
    }
    return make_assignment(net, pairs);
}

json score_to_json(double x) {
    if (std::isinf(x) && x > 0) return "inf";
    return x;
}

json to_json(const BayesianNetwork& net, const Posterior& p) {
    json marginals = json::object();
    for (VarId t : p.targets) {
        const auto m = p.marginal(t);
        json dist = json::object();
        for (StateId s = 0; s < m.size(); ++s) dist[net.variable(t).states[s]] = m[s];
        marginals[net.variable(t).name] = std::move(dist);
    }
    return {{"posterior", std::move(marginals)}, {"evidence_probability", p.evidence_probability}};
}

json to_json(const BayesianNetwork& net, const QueryClassification& c) {
    json roles = json::object();
    for (auto [v, role] : c.roles) roles[net.variable(v).name] = std::string(to_string(role));
    return {{"kind", std::string(to_string(c.kind))}, {"roles", std::move(roles)}};
}

json to_json(const BayesianNetwork& net, const BeliefChangeReport& r) {
    return {{"variable", net.variable(r.variable).name},
            {"state", net.variable(r.variable).states[r.state]},
            {"prior", r.prior},
            {"posterior", r.posterior},
            {"magnitude", r.magnitude},
            {"direction", std::string(to_string(r.direction))},
            {"kind", std::string(to_string(r.kind))}};
}

json to_json(const ExplainingAwayReport& r) {
    return {{"before", r.before}, {"after", r.after}, {"active", r.active}};
}

json to_json(const BayesianNetwork& net, const Explanation& e) {
    json out = {{"assignment", assignment_to_json(net, e.assignment)},
                {"score", score_to_json(e.score)},
                {"score_kind", std::string(to_string(e.score_kind))}};
    if (e.score_kind == ScoreKind::JointPosterior) out["posterior"] = e.posterior;
    return out;
}

json to_json(const BayesianNetwork& net, const ExplanationRanking& r) {
    json entries = json::array();
    for (const auto& e : r.entries) entries.push_back(to_json(net, e));
    json targets = json::array();
    for (VarId t : r.target_set) targets.push_back(net.variable(t).name);
    return {{"entries", std::move(entries)},
            {"target_set", std::move(targets)},
            {"candidates", r.candidates}};
}

json to_json(const DecisionOutcome& d) {
    return {{"posterior", d.posterior},
            {"threshold", d.threshold},
            {"decision", std::string(to_string(d.decision))}};
}

json to_json(const BayesianNetwork& net, const SdpResult& r) {
    json branches = json::array();
    for (const auto& b : r.branches)
        branches.push_back({{"hidden", assignment_to_json(net, b.hidden)},
                            {"weight", b.weight},
                            {"posterior", b.posterior},
                            {"same_decision", b.same_decision}});
    return {{"sdp", r.sdp}, {"baseline", to_json(r.baseline)}, {"branches", std::move(branches)}};
}

namespace {

void round_floats(json& j) {
    if (j.is_number_float()) {
        const double x = j.get<double>();
        if (!std::isfinite(x)) return;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        j = std::strtod(buf, nullptr);
    } else if (j.is_structured()) {
        for (auto& child : j) round_floats(child);
    }
}

}  // namespace

std::string canonical_dump(const json& j) {
    json copy = j;
    round_floats(copy);
    return copy.dump(2);
}

std::string format4(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    // Avoid printing "-0.0000" for tiny negative magnitudes.
    if (std::string_view(buf) == "-0.0000") return "0.0000";
    return buf;
}

}  // namespace xbn
