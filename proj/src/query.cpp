#include "xbn/query.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "xbn/error.hpp"
#include "xbn/explain_decision.hpp"
#include "xbn/explain_evidence.hpp"
#include "xbn/explain_reasoning.hpp"
#include "xbn/inference.hpp"
#include "xbn/json_io.hpp"
#include "xbn/taxonomy_router.hpp"

namespace xbn::api {

namespace {

json names(const BayesianNetwork& net, const std::vector<VarId>& vars) {
    json out = json::array();
    for (VarId v : vars) out.push_back(net.variable(v).name);
    return out;
}

std::vector<VarId> unobserved(const BayesianNetwork& net, const Evidence& e) {
    std::vector<VarId> out;
    for (VarId v = 0; v < net.size(); ++v)
        if (!e.contains(v)) out.push_back(v);
    return out;
}

class Request {
public:
    Request(const BayesianNetwork& net, const json& body) : net_(net), body_(body) {
        if (!body_.is_object()) throw UsageError("query request must be a JSON object");
    }

    std::string operation() const {
        const json* op = find("operation");
        if (!op || !op->is_string()) throw UsageError("query request requires an 'operation'");
        const std::string name = op->get<std::string>();
        if (std::find(std::begin(kOperations), std::end(kOperations), name) == std::end(kOperations))
            throw UsageError("unknown operation '" + name + "'");
        return name;
    }

    Evidence evidence() const {
        const json* e = find("evidence");
        return e ? assignment_from_json(net_, *e) : Evidence{};
    }

    /// Variables listed under `key`; "ALL" (or a missing member when
    /// `default_all`) expands to every unobserved variable, sorted.
    std::vector<VarId> variables(const char* key, const Evidence& evidence, bool default_all) const {
        const json* j = find(key);
        if (!j) {
            if (default_all) return unobserved(net_, evidence);
            throw UsageError(std::string("query requires '") + key + "'");
        }
        auto is_all = [](const json& x) {
            return (x.is_string() && x.get<std::string>() == "ALL") ||
                   (x.is_array() && x.size() == 1 && x[0].is_string() && x[0].get<std::string>() == "ALL");
        };
        if (is_all(*j)) return unobserved(net_, evidence);
        std::vector<std::string> list;
        if (j->is_string()) {
            list.push_back(j->get<std::string>());
        } else if (j->is_array()) {
            for (const auto& n : *j) {
                if (!n.is_string()) throw UsageError(std::string("'") + key + "' must contain variable names");
                list.push_back(n.get<std::string>());
            }
        } else {
            throw UsageError(std::string("'") + key + "' must be a list of variable names");
        }
        return resolve_variables(net_, list);
    }

    VarId variable(const char* key) const {
        const json* j = find(key);
        if (!j || !j->is_string()) throw UsageError(std::string("query requires '") + key + "'");
        return net_.index_of(j->get<std::string>());
    }

    Assignment assignment(const char* key) const {
        const json* j = find(key);
        if (!j) throw UsageError(std::string("query requires '") + key + "'");
        return assignment_from_json(net_, *j);
    }

    Assignment::Entry entry(const char* key) const {
        Assignment a = assignment(key);
        if (a.size() != 1) throw UsageError(std::string("'") + key + "' must name exactly one Var=state");
        return a.entries().front();
    }

    double number(const char* key) const {
        const json* j = find(key);
        if (!j || !j->is_number()) throw UsageError(std::string("query requires numeric '") + key + "'");
        return j->get<double>();
    }

    std::size_t count(const char* key, std::size_t fallback) const {
        const json* j = find(key);
        if (!j) return fallback;
        if (!j->is_number_integer() || j->get<long long>() < 0)
            throw UsageError(std::string("'") + key + "' must be a nonnegative integer");
        return j->get<std::size_t>();
    }

    bool flag(const char* key, bool fallback) const {
        const json* j = find(key);
        if (!j) return fallback;
        if (!j->is_boolean()) throw UsageError(std::string("'") + key + "' must be true or false");
        return j->get<bool>();
    }

    const json* find(const char* key) const {
        auto it = body_.find(key);
        return it == body_.end() || it->is_null() ? nullptr : &*it;
    }

private:
    const BayesianNetwork& net_;
    const json& body_;
};

json marginals_from(const BayesianNetwork& net, const Factor& f, const std::vector<VarId>& targets) {
    json out = json::object();
    const double z = f.total();
    for (VarId t : targets) {
        VarId keep[] = {t};
        const auto m = f.marginal(keep).values();
        json dist = json::object();
        for (StateId s = 0; s < m.size(); ++s) dist[net.variable(t).states[s]] = m[s] / z;
        out[net.variable(t).name] = std::move(dist);
    }
    return out;
}

json run_oracle(const BayesianNetwork& net, const std::vector<VarId>& targets, const Evidence& evidence) {
    const Posterior ve = posterior(net, targets, evidence);
    const Factor full = enumerate_distribution(net, evidence);
    const double pe_enum = full.total();
    if (!(pe_enum > 0.0)) throw ImpossibleEvidenceError();
    const Factor joint = full.marginal(targets);

    double diff = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i)
        diff = std::max(diff, std::abs(joint.values()[i] / pe_enum - ve.distribution.values()[i]));
    return {{"variable_elimination", to_json(net, ve)["posterior"]},
            {"enumeration", marginals_from(net, full, targets)},
            {"evidence_probability",
             {{"variable_elimination", ve.evidence_probability}, {"enumeration", pe_enum}}},
            {"max_abs_difference", diff}};
}

}  // namespace

json execute(const BayesianNetwork& net, const json& body) {
    const Request req(net, body);
    const std::string op = req.operation();
    const Evidence evidence = req.evidence();
    json params = {{"evidence", assignment_to_json(net, evidence)}};
    json result;

    if (op == "infer" || op == "oracle") {
        const auto targets = req.variables("targets", evidence, op == "oracle");
        params["targets"] = names(net, targets);
        result = op == "infer" ? to_json(net, posterior(net, targets, evidence))
                               : run_oracle(net, targets, evidence);
    } else if (op == "classify") {
        const VarId target = req.variable("target");
        params["target"] = net.variable(target).name;
        result = to_json(net, classify(net, target, evidence));
    } else if (op == "mpe") {
        result = to_json(net, mpe(net, evidence));
    } else if (op == "map") {
        const auto targets = req.variables("targets", evidence, false);
        params["targets"] = names(net, targets);
        result = to_json(net, map_query(net, targets, evidence));
    } else if (op == "mre") {
        auto targets = req.variables("targets", evidence, true);
        std::sort(targets.begin(), targets.end());
        MreOptions options;
        options.k = req.count("k", 10);
        options.prune_dominated = req.flag("prune_dominated", true);
        params["targets"] = names(net, targets);
        params["k"] = options.k;
        params["prune_dominated"] = options.prune_dominated;
        result = to_json(net, mre(net, targets, evidence, options));
    } else if (op == "gbf") {
        const Assignment x = req.assignment("explanation");
        params["explanation"] = assignment_to_json(net, x);
        result = {{"gbf", score_to_json(gbf(net, x, evidence))}};
    } else if (op == "sdp" || op == "decide") {
        const auto hypothesis = req.entry("hypothesis");
        const double threshold = req.number("threshold");
        params["hypothesis"] = assignment_to_json(net, Assignment{hypothesis});
        params["threshold"] = threshold;
        if (op == "decide") {
            result = to_json(decide(net, hypothesis, threshold, evidence));
        } else {
            std::vector<VarId> hidden = req.find("hidden") ? req.variables("hidden", evidence, false)
                                                           : std::vector<VarId>{};
            if (const json* h = req.find("hidden"); h && h->is_string())
                std::erase(hidden, hypothesis.first);
            std::sort(hidden.begin(), hidden.end());
            params["hidden"] = names(net, hidden);
            result = to_json(net, sdp(net, DecisionSpec{hypothesis, threshold, evidence, hidden}));
        }
    } else {  // explain
        const json* qj = req.find("question");
        if (!qj) throw UsageError("explain requires a 'question'");
        json question = *qj;
        if (question.is_object() && !question.contains("evidence"))
            question["evidence"] = assignment_to_json(net, evidence);
        const QuestionSpec q = question_from_json(net, question);
        params["evidence"] = assignment_to_json(net, q.evidence);
        params["question"] = std::string(to_string(q.kind));
        result = to_json(net, explain(net, q));
    }

    return {{"network", net.name()}, {"operation", op}, {"params", std::move(params)},
            {"result", std::move(result)}};
}

// ---------------------------------------------------------------------------
// Table rendering. Every number printed here is format4() of a number in
// the JSON response, so table and JSON output always agree.

namespace {

std::string cell(const json& x) {
    if (x.is_number_float()) return format4(x.get<double>());
    if (x.is_string()) return x.get<std::string>();
    return x.dump();
}

std::string pairs_text(const json& obj) {
    std::string out;
    for (auto it = obj.begin(); it != obj.end(); ++it)
        out += (out.empty() ? "" : ", ") + it.key() + "=" + it.value().get<std::string>();
    return out.empty() ? "(none)" : out;
}

class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string str() const {
        std::vector<std::size_t> width;
        for (const auto& r : rows_)
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (width.size() <= i) width.push_back(0);
                width[i] = std::max(width[i], r[i].size());
            }
        std::ostringstream os;
        for (std::size_t ri = 0; ri < rows_.size(); ++ri) {
            for (std::size_t i = 0; i < rows_[ri].size(); ++i) {
                os << rows_[ri][i];
                if (i + 1 < rows_[ri].size()) os << std::string(width[i] - rows_[ri][i].size() + 2, ' ');
            }
            os << '\n';
            if (ri == 0) {
                std::size_t total = 0;
                for (std::size_t w : width) total += w + 2;
                os << std::string(total > 2 ? total - 2 : total, '-') << '\n';
            }
        }
        return os.str();
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string marginals_table(const json& posterior) {
    Table t({"variable", "state", "probability"});
    for (auto v = posterior.begin(); v != posterior.end(); ++v)
        for (auto s = v.value().begin(); s != v.value().end(); ++s) t.add({v.key(), s.key(), cell(s.value())});
    return t.str();
}

}  // namespace

std::string render_table(const json& response) {
    const std::string op = response.at("operation").get<std::string>();
    const json& r = response.at("result");
    const json& params = response.at("params");
    std::ostringstream os;
    os << "network: " << response.at("network").get<std::string>() << '\n'
       << "evidence: " << pairs_text(params.at("evidence")) << "\n\n";

    if (op == "infer") {
        os << marginals_table(r.at("posterior"));
        os << "P(evidence) = " << cell(r.at("evidence_probability")) << '\n';
    } else if (op == "oracle") {
        os << "variable elimination:\n" << marginals_table(r.at("variable_elimination"));
        os << "\nenumeration:\n" << marginals_table(r.at("enumeration"));
        os << "\nP(evidence): " << cell(r.at("evidence_probability").at("variable_elimination")) << " (VE), "
           << cell(r.at("evidence_probability").at("enumeration")) << " (enumeration)\n";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", r.at("max_abs_difference").get<double>());
        os << "max |difference|: " << buf << '\n';
    } else if (op == "classify") {
        os << "target: " << params.at("target").get<std::string>() << '\n'
           << "kind: " << r.at("kind").get<std::string>() << "\n\n";
        Table t({"evidence variable", "role"});
        for (auto it = r.at("roles").begin(); it != r.at("roles").end(); ++it) t.add({it.key(), cell(it.value())});
        os << t.str();
    } else if (op == "mpe" || op == "map") {
        Table t({"variable", "state"});
        for (auto it = r.at("assignment").begin(); it != r.at("assignment").end(); ++it)
            t.add({it.key(), cell(it.value())});
        os << t.str();
        os << "score = " << cell(r.at("score")) << ", posterior = " << cell(r.at("posterior")) << '\n';
    } else if (op == "mre") {
        Table t({"rank", "explanation", "GBF"});
        std::size_t rank = 1;
        for (const auto& e : r.at("entries"))
            t.add({std::to_string(rank++), pairs_text(e.at("assignment")), cell(e.at("score"))});
        os << t.str();
        os << "candidates: " << r.at("candidates").get<std::size_t>() << '\n';
    } else if (op == "gbf") {
        os << "explanation: " << pairs_text(params.at("explanation")) << '\n'
           << "GBF = " << cell(r.at("gbf")) << '\n';
    } else if (op == "decide") {
        os << "hypothesis: " << pairs_text(params.at("hypothesis")) << '\n'
           << "posterior = " << cell(r.at("posterior")) << ", threshold = " << cell(r.at("threshold"))
           << " -> " << r.at("decision").get<std::string>() << '\n';
    } else if (op == "sdp") {
        const json& b = r.at("baseline");
        os << "hypothesis: " << pairs_text(params.at("hypothesis")) << '\n'
           << "posterior = " << cell(b.at("posterior")) << ", threshold = " << cell(b.at("threshold"))
           << " -> " << b.at("decision").get<std::string>() << '\n'
           << "SDP = " << cell(r.at("sdp")) << "\n\n";
        Table t({"hidden", "P(h|e)", "posterior", "same decision"});
        for (const auto& br : r.at("branches"))
            t.add({pairs_text(br.at("hidden")), cell(br.at("weight")), cell(br.at("posterior")),
                   br.at("same_decision").get<bool>() ? "yes" : "no"});
        os << t.str();
    } else if (op == "explain") {
        os << "question: " << params.at("question").get<std::string>() << '\n'
           << "method: " << r.at("plan").at("category").get<std::string>() << '/'
           << r.at("plan").at("operation").get<std::string>() << "\n\n"
           << r.at("narrative").get<std::string>() << '\n';
    }
    return os.str();
}

}  // namespace xbn::api
