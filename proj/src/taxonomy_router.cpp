#include "xbn/taxonomy_router.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xbn/error.hpp"
#include "xbn/explain_decision.hpp"
#include "xbn/explain_evidence.hpp"
#include "xbn/inference.hpp"
#include "xbn/json_io.hpp"

namespace xbn {

namespace {

constexpr std::string_view kTemplateText =
#include "xbn_templates.inc"
    ;

constexpr double kCertainSdp = 1.0 - 1e-12;

}  // namespace

std::string_view to_string(QuestionKind k) {
    switch (k) {
        case QuestionKind::WhatWillHappen: return "WhatWillHappen";
        case QuestionKind::WhatWentWrong: return "WhatWentWrong";
        case QuestionKind::MutualCauses: return "MutualCauses";
        case QuestionKind::MostProbableScenario: return "MostProbableScenario";
        case QuestionKind::MostRelevantExplanation: return "MostRelevantExplanation";
        case QuestionKind::ReadyToDecide: return "ReadyToDecide";
        case QuestionKind::WhatMoreInfo: return "WhatMoreInfo";
    }
    return "WhatWillHappen";
}

QuestionKind question_kind_from_string(std::string_view s) {
    for (QuestionKind k : kAllQuestionKinds)
        if (to_string(k) == s) return k;
    throw UsageError("unknown question kind '" + std::string(s) + "'");
}

std::string_view to_string(Category c) {
    switch (c) {
        case Category::Reasoning: return "reasoning";
        case Category::Evidence: return "evidence";
        case Category::Decision: return "decision";
    }
    return "reasoning";
}

std::string_view to_string(Operation o) {
    switch (o) {
        case Operation::Posterior: return "posterior";
        case Operation::ExplainingAway: return "explaining_away";
        case Operation::Mpe: return "mpe";
        case Operation::Map: return "map";
        case Operation::Mre: return "mre";
        case Operation::Sdp: return "sdp";
        case Operation::SdpSweep: return "sdp_sweep";
    }
    return "posterior";
}

// ---------------------------------------------------------------------------
// Templates

const TemplateSet& TemplateSet::builtin() {
    static const TemplateSet set = parse(kTemplateText);
    return set;
}

TemplateSet TemplateSet::parse(std::string_view text) {
    TemplateSet out;
    std::string current;
    std::string body;
    auto flush = [&] {
        if (current.empty()) return;
        while (!body.empty() && body.back() == '\n') body.pop_back();
        out.sections_[current] = body;
        body.clear();
    };
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.front() == '#') continue;
        if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
            flush();
            current = std::string(line.substr(1, line.size() - 2));
            continue;
        }
        if (current.empty()) continue;
        if (line.empty() && body.empty()) continue;
        body += line;
        body += '\n';
    }
    flush();
    return out;
}

bool TemplateSet::has(std::string_view section) const { return sections_.find(section) != sections_.end(); }

std::string TemplateSet::render(std::string_view section,
                                const std::map<std::string, std::string>& values) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) throw std::out_of_range("no template section '" + std::string(section) + "'");
    const std::string& tpl = it->second;
    std::string out;
    for (std::size_t i = 0; i < tpl.size(); ++i) {
        if (tpl[i] != '{') {
            out += tpl[i];
            continue;
        }
        const auto close = tpl.find('}', i);
        if (close == std::string::npos) throw std::out_of_range("unterminated placeholder");
        const std::string key = tpl.substr(i + 1, close - i - 1);
        auto v = values.find(key);
        if (v == values.end())
            throw std::out_of_range("unbound placeholder '{" + key + "}' in [" + std::string(section) + "]");
        out += v->second;
        i = close;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Routing

namespace {

std::string names_of(const BayesianNetwork& net, const std::vector<VarId>& vars) {
    std::string out;
    for (VarId v : vars) out += (out.empty() ? "" : ", ") + net.variable(v).name;
    return out.empty() ? "no variables" : out;
}

std::string evidence_text(const BayesianNetwork& net, const Evidence& e) {
    return e.empty() ? "no evidence" : describe(net, e);
}

std::string entry_text(const BayesianNetwork& net, Assignment::Entry e) {
    return net.variable(e.first).name + "=" + net.variable(e.first).states.at(e.second);
}

void check_entry(const BayesianNetwork& net, const std::optional<Assignment::Entry>& e,
                 const char* slot, QuestionKind kind) {
    if (!e)
        throw UsageError(std::string(to_string(kind)) + " requires the '" + slot + "' slot");
    if (e->first >= net.size() || e->second >= net.cardinality(e->first))
        throw UsageError(std::string("invalid '") + slot + "' slot");
}

std::vector<VarId> unobserved(const BayesianNetwork& net, const Evidence& e) {
    std::vector<VarId> out;
    for (VarId v = 0; v < net.size(); ++v)
        if (!e.contains(v)) out.push_back(v);
    return out;
}

}  // namespace

MethodPlan route(const BayesianNetwork& net, const QuestionSpec& q) {
    check_assignment(net, q.evidence);
    MethodPlan plan;
    plan.arguments = q;
    switch (q.kind) {
        case QuestionKind::WhatWillHappen:
        case QuestionKind::WhatWentWrong:
            if (!q.target) throw UsageError(std::string(to_string(q.kind)) + " requires the 'target' slot");
            if (*q.target >= net.size()) throw UsageError("invalid 'target' slot");
            if (q.evidence.contains(*q.target))
                throw UsageError("target '" + net.variable(*q.target).name + "' is observed");
            plan.category = Category::Reasoning;
            plan.operation = Operation::Posterior;
            plan.expected_kind = q.kind == QuestionKind::WhatWillHappen ? ReasoningKind::Predictive
                                                                        : ReasoningKind::Diagnostic;
            break;
        case QuestionKind::MutualCauses:
            check_entry(net, q.cause, "cause", q.kind);
            check_entry(net, q.competitor, "competitor", q.kind);
            if (q.evidence.empty()) throw UsageError("MutualCauses requires an observed effect");
            plan.category = Category::Reasoning;
            plan.operation = Operation::ExplainingAway;
            break;
        case QuestionKind::MostProbableScenario:
            plan.category = Category::Evidence;
            plan.operation = q.target_set.empty() ? Operation::Mpe : Operation::Map;
            break;
        case QuestionKind::MostRelevantExplanation:
            plan.category = Category::Evidence;
            plan.operation = Operation::Mre;
            if (plan.arguments.target_set.empty()) plan.arguments.target_set = unobserved(net, q.evidence);
            break;
        case QuestionKind::ReadyToDecide:
        case QuestionKind::WhatMoreInfo:
            check_entry(net, q.hypothesis, "hypothesis", q.kind);
            if (!(q.threshold >= 0.0 && q.threshold <= 1.0))
                throw UsageError("threshold must lie in [0, 1]");
            plan.category = Category::Decision;
            plan.operation = q.kind == QuestionKind::ReadyToDecide ? Operation::Sdp : Operation::SdpSweep;
            if (q.kind == QuestionKind::WhatMoreInfo && !q.hidden.empty())
                throw UsageError("WhatMoreInfo chooses its own candidate observations; omit 'hidden'");
            break;
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

struct Rendered {
    json payload;
    std::string narrative;
};

Rendered run_posterior(const BayesianNetwork& net, const MethodPlan& plan) {
    const QuestionSpec& q = plan.arguments;
    const TemplateSet& t = TemplateSet::builtin();
    const VarId target = *q.target;
    const Variable& var = net.variable(target);

    const QueryClassification cls = classify(net, target, q.evidence);
    const json prior = to_json(net, posterior(net, {target}, {}));
    const json post = to_json(net, posterior(net, {target}, q.evidence));

    Rendered r;
    r.payload = {{"target", var.name},
                 {"kind", std::string(to_string(cls.kind))},
                 {"expected_kind", std::string(to_string(*plan.expected_kind))},
                 {"classification", to_json(net, cls)},
                 {"prior", prior["posterior"][var.name]},
                 {"posterior", post["posterior"][var.name]},
                 {"evidence_probability", post["evidence_probability"]}};
    json changes = json::array();
    r.narrative = t.render(to_string(q.kind), {{"target", var.name},
                                               {"evidence", evidence_text(net, q.evidence)},
                                               {"kind", std::string(to_string(cls.kind))}});
    for (StateId s = 0; s < var.cardinality(); ++s) {
        const BeliefChangeReport change = belief_change(net, target, s, q.evidence);
        changes.push_back(to_json(net, change));
        r.narrative += "\n" + t.render("belief.item", {{"target", var.name},
                                                       {"state", var.states[s]},
                                                       {"prior", format4(change.prior)},
                                                       {"posterior", format4(change.posterior)},
                                                       {"direction", std::string(to_string(change.direction))}});
    }
    r.payload["changes"] = std::move(changes);
    return r;
}

Rendered run_explaining_away(const BayesianNetwork& net, const MethodPlan& plan) {
    const QuestionSpec& q = plan.arguments;
    const TemplateSet& t = TemplateSet::builtin();
    const ExplainingAwayReport rep = explaining_away(net, *q.cause, *q.competitor, q.evidence);
    Rendered r;
    r.payload = to_json(rep);
    r.payload["cause"] = assignment_to_json(net, Assignment{*q.cause});
    r.payload["competitor"] = assignment_to_json(net, Assignment{*q.competitor});
    const std::string cause = entry_text(net, *q.cause);
    const std::string competitor = entry_text(net, *q.competitor);
    r.narrative = t.render("MutualCauses", {{"evidence", evidence_text(net, q.evidence)},
                                            {"cause", cause},
                                            {"competitor", competitor},
                                            {"before", format4(rep.before)},
                                            {"after", format4(rep.after)}});
    r.narrative += "\n" + t.render(rep.active ? "explained_away" : "not_explained_away",
                                   {{"cause", cause}, {"competitor", competitor}});
    return r;
}

Rendered run_scenario(const BayesianNetwork& net, const MethodPlan& plan) {
    const QuestionSpec& q = plan.arguments;
    const TemplateSet& t = TemplateSet::builtin();
    Rendered r;
    Explanation e;
    if (plan.operation == Operation::Mpe) {
        e = mpe(net, q.evidence);
        r.narrative = t.render("MostProbableScenario", {{"evidence", evidence_text(net, q.evidence)},
                                                        {"score", format4(e.score)},
                                                        {"posterior", format4(e.posterior)}});
    } else {
        e = map_query(net, q.target_set, q.evidence);
        r.narrative = t.render("MostProbableScenario.map", {{"targets", names_of(net, q.target_set)},
                                                            {"evidence", evidence_text(net, q.evidence)},
                                                            {"posterior", format4(e.posterior)}});
    }
    r.payload = to_json(net, e);
    for (auto [v, s] : e.assignment)
        r.narrative += "\n" + t.render("scenario.item", {{"variable", net.variable(v).name},
                                                         {"state", net.variable(v).states[s]}});
    return r;
}

Rendered run_mre(const BayesianNetwork& net, const MethodPlan& plan) {
    const QuestionSpec& q = plan.arguments;
    const TemplateSet& t = TemplateSet::builtin();
    MreOptions options;
    options.k = q.k;
    const ExplanationRanking ranking = mre(net, q.target_set, q.evidence, options);
    Rendered r;
    r.payload = to_json(net, ranking);
    r.payload["k"] = q.k;
    r.narrative = t.render("MostRelevantExplanation", {{"evidence", evidence_text(net, q.evidence)},
                                                       {"targets", names_of(net, ranking.target_set)}});
    for (const auto& e : ranking.entries)
        r.narrative += "\n" + t.render("mre.item", {{"explanation", describe(net, e.assignment)},
                                                    {"score", format4(e.score)}});
    if (!ranking.entries.empty())
        r.narrative += "\n" + t.render("mre.best", {{"explanation", describe(net, ranking.entries.front().assignment)}});
    return r;
}

Rendered run_sdp(const BayesianNetwork& net, const MethodPlan& plan) {
    const QuestionSpec& q = plan.arguments;
    const TemplateSet& t = TemplateSet::builtin();
    DecisionSpec spec{*q.hypothesis, q.threshold, q.evidence, q.hidden};
    const SdpResult res = sdp(net, spec);
    Rendered r;
    r.payload = to_json(net, res);
    r.payload["hypothesis"] = assignment_to_json(net, Assignment{*q.hypothesis});
    std::vector<VarId> hidden = q.hidden;
    std::sort(hidden.begin(), hidden.end());
    r.narrative = t.render("ReadyToDecide",
                           {{"hypothesis", entry_text(net, *q.hypothesis)},
                            {"evidence", evidence_text(net, q.evidence)},
                            {"posterior", format4(res.baseline.posterior)},
                            {"threshold", format4(res.baseline.threshold)},
                            {"decision", std::string(to_string(res.baseline.decision))},
                            {"hidden", names_of(net, hidden)},
                            {"sdp", format4(res.sdp)}});
    return r;
}

Rendered run_sdp_sweep(const BayesianNetwork& net, const MethodPlan& plan) {
    const QuestionSpec& q = plan.arguments;
    const TemplateSet& t = TemplateSet::builtin();
    const DecisionOutcome baseline = decide(net, *q.hypothesis, q.threshold, q.evidence);

    struct Candidate {
        VarId variable;
        double sdp;
        double low;
        double high;
    };
    std::vector<Candidate> candidates;
    for (VarId v = 0; v < net.size(); ++v) {
        if (v == q.hypothesis->first || q.evidence.contains(v)) continue;
        const SdpResult res = sdp(net, DecisionSpec{*q.hypothesis, q.threshold, q.evidence, {v}});
        Candidate c{v, res.sdp, 1.0, 0.0};
        for (const auto& b : res.branches) {
            if (b.weight <= 0.0) continue;
            c.low = std::min(c.low, b.posterior);
            c.high = std::max(c.high, b.posterior);
        }
        candidates.push_back(c);
    }
    // Lowest SDP first; among equals, the widest spread of branch posteriors.
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        const double qa = std::round(a.sdp * 1e12), qb = std::round(b.sdp * 1e12);
        if (qa != qb) return qa < qb;
        return (a.high - a.low) > (b.high - b.low);
    });

    Rendered r;
    json list = json::array();
    r.narrative = t.render("WhatMoreInfo", {{"hypothesis", entry_text(net, *q.hypothesis)},
                                            {"evidence", evidence_text(net, q.evidence)},
                                            {"posterior", format4(baseline.posterior)},
                                            {"threshold", format4(baseline.threshold)},
                                            {"decision", std::string(to_string(baseline.decision))}});
    for (const auto& c : candidates) {
        const std::string label =
            c.sdp >= kCertainSdp ? "would not change the decision" : "could change the decision";
        list.push_back({{"variable", net.variable(c.variable).name},
                        {"sdp", c.sdp},
                        {"posterior_low", c.low},
                        {"posterior_high", c.high},
                        {"label", label}});
        r.narrative += "\n" + t.render("info.item", {{"variable", net.variable(c.variable).name},
                                                     {"sdp", format4(c.sdp)},
                                                     {"low", format4(c.low)},
                                                     {"high", format4(c.high)},
                                                     {"label", label}});
    }
    r.payload = {{"baseline", to_json(baseline)},
                 {"hypothesis", assignment_to_json(net, Assignment{*q.hypothesis})},
                 {"candidates", std::move(list)}};
    return r;
}

}  // namespace

ExplanationReport explain(const BayesianNetwork& net, const QuestionSpec& q) {
    ExplanationReport report;
    report.plan = route(net, q);
    report.network = net.name();
    report.evidence = q.evidence;
    Rendered r;
    try {
        switch (report.plan.operation) {
            case Operation::Posterior: r = run_posterior(net, report.plan); break;
            case Operation::ExplainingAway: r = run_explaining_away(net, report.plan); break;
            case Operation::Mpe:
            case Operation::Map: r = run_scenario(net, report.plan); break;
            case Operation::Mre: r = run_mre(net, report.plan); break;
            case Operation::Sdp: r = run_sdp(net, report.plan); break;
            case Operation::SdpSweep: r = run_sdp_sweep(net, report.plan); break;
        }
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(to_string(q.kind)) + ": " + e.what());
    }
    report.payload = std::move(r.payload);
    report.narrative = std::move(r.narrative);
    return report;
}

json to_json(const BayesianNetwork& net, const MethodPlan& plan) {
    const QuestionSpec& q = plan.arguments;
    json args = {{"question", std::string(to_string(q.kind))},
                 {"evidence", assignment_to_json(net, q.evidence)}};
    auto names = [&](const std::vector<VarId>& vars) {
        json out = json::array();
        for (VarId v : vars) out.push_back(net.variable(v).name);
        return out;
    };
    switch (plan.operation) {
        case Operation::Posterior: args["target"] = net.variable(*q.target).name; break;
        case Operation::ExplainingAway:
            args["cause"] = assignment_to_json(net, Assignment{*q.cause});
            args["competitor"] = assignment_to_json(net, Assignment{*q.competitor});
            break;
        case Operation::Mpe: break;
        case Operation::Map: args["targets"] = names(q.target_set); break;
        case Operation::Mre:
            args["targets"] = names(q.target_set);
            args["k"] = q.k;
            break;
        case Operation::Sdp:
        case Operation::SdpSweep:
            args["hypothesis"] = assignment_to_json(net, Assignment{*q.hypothesis});
            args["threshold"] = q.threshold;
            if (plan.operation == Operation::Sdp) {
                std::vector<VarId> hidden = q.hidden;
                std::sort(hidden.begin(), hidden.end());
                args["hidden"] = names(hidden);
            }
            break;
    }
    json out = {{"category", std::string(to_string(plan.category))},
                {"operation", std::string(to_string(plan.operation))},
                {"arguments", std::move(args)}};
    if (plan.expected_kind) out["expected_kind"] = std::string(to_string(*plan.expected_kind));
    return out;
}

json to_json(const BayesianNetwork& net, const ExplanationReport& report) {
    return {{"plan", to_json(net, report.plan)},
            {"payload", report.payload},
            {"narrative", report.narrative},
            {"provenance", {{"network", report.network}, {"evidence", assignment_to_json(net, report.evidence)}}}};
}

namespace {

Assignment::Entry entry_from_json(const BayesianNetwork& net, const json& j, const char* slot) {
    Assignment a = assignment_from_json(net, j);
    if (a.size() != 1) throw UsageError(std::string("'") + slot + "' must name exactly one Var=state");
    return a.entries().front();
}

// nullopt stands for "ALL".
std::optional<std::vector<VarId>> vars_from_json(const BayesianNetwork& net, const json& j,
                                                 const char* slot) {
    if (j.is_string()) {
        if (j.get<std::string>() == "ALL") return std::nullopt;
        return std::vector<VarId>{net.index_of(j.get<std::string>())};
    }
    if (!j.is_array()) throw UsageError(std::string("'") + slot + "' must be an array of variable names");
    std::vector<std::string> names;
    for (const auto& n : j) {
        if (!n.is_string()) throw UsageError(std::string("'") + slot + "' must contain variable names");
        names.push_back(n.get<std::string>());
    }
    if (names.size() == 1 && names.front() == "ALL") return std::nullopt;
    return resolve_variables(net, names);
}

}  // namespace

QuestionSpec question_from_json(const BayesianNetwork& net, const json& j) {
    if (!j.is_object()) throw UsageError("'question' must be an object");
    if (!j.contains("kind") || !j["kind"].is_string()) throw UsageError("question requires a 'kind'");
    QuestionSpec q;
    q.kind = question_kind_from_string(j["kind"].get<std::string>());
    if (j.contains("evidence")) q.evidence = assignment_from_json(net, j["evidence"]);
    if (j.contains("target")) {
        if (!j["target"].is_string()) throw UsageError("'target' must be a variable name");
        q.target = net.index_of(j["target"].get<std::string>());
    }
    if (j.contains("cause")) q.cause = entry_from_json(net, j["cause"], "cause");
    if (j.contains("competitor")) q.competitor = entry_from_json(net, j["competitor"], "competitor");
    if (j.contains("targets"))
        q.target_set = vars_from_json(net, j["targets"], "targets").value_or(std::vector<VarId>{});
    if (j.contains("k")) {
        if (!j["k"].is_number_integer() || j["k"].get<long long>() < 0) throw UsageError("'k' must be a nonnegative integer");
        q.k = j["k"].get<std::size_t>();
    }
    if (j.contains("hypothesis")) q.hypothesis = entry_from_json(net, j["hypothesis"], "hypothesis");
    if (j.contains("threshold")) {
        if (!j["threshold"].is_number()) throw UsageError("'threshold' must be a number");
        q.threshold = j["threshold"].get<double>();
    }
    if (j.contains("hidden")) {
        auto hidden = vars_from_json(net, j["hidden"], "hidden");
        if (hidden) {
            q.hidden = std::move(*hidden);
        } else {
            for (VarId v = 0; v < net.size(); ++v)
                if (!q.evidence.contains(v) && !(q.hypothesis && q.hypothesis->first == v))
                    q.hidden.push_back(v);
        }
    }
    return q;
}

}  // namespace xbn
