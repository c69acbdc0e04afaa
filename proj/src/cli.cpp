#include "xbn/cli.hpp"

#include <chrono>
#include <ostream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "xbn/error.hpp"
#include "xbn/format.hpp"
#include "xbn/json_io.hpp"
#include "xbn/logging.hpp"
#include "xbn/query.hpp"
#include "xbn/service.hpp"

namespace xbn::cli {

namespace {

struct Options {
    std::string net = std::string(kBuiltinAsia);
    std::vector<std::string> evidence;
    std::string format = "table";
    std::vector<std::string> targets;
    std::string target;
    std::size_t top_k = 10;
    bool all_candidates = false;
    std::string hypothesis;
    std::optional<double> threshold;
    std::vector<std::string> hidden;
    std::string explanation;
    std::string question;
    std::string cause;
    std::string competitor;
    std::string host = "127.0.0.1";
    int port = 8080;
};

std::string joined(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
    return out;
}

// A variable list flag: "ALL" stays a string, otherwise an array of names.
json name_list(const std::vector<std::string>& items) {
    if (items.size() == 1 && items[0] == "ALL") return "ALL";
    return items;
}

json build_request(const std::string& command, const Options& o) {
    static const std::map<std::string, std::string> kOperation = {
        {"query", "infer"}, {"classify", "classify"}, {"mpe", "mpe"},   {"map", "map"},
        {"gbf", "gbf"},     {"mre", "mre"},           {"sdp", "sdp"},   {"decide", "decide"},
        {"explain", "explain"}, {"oracle", "oracle"}};
    json r = {{"operation", kOperation.at(command)}};
    if (!o.evidence.empty()) r["evidence"] = joined(o.evidence);
    if (!o.targets.empty()) r["targets"] = name_list(o.targets);
    if (command == "classify") r["target"] = o.target;
    if (command == "gbf") r["explanation"] = o.explanation;
    if (command == "mre") {
        r["k"] = o.top_k;
        r["prune_dominated"] = !o.all_candidates;
    }
    if (command == "sdp" || command == "decide") {
        r["hypothesis"] = o.hypothesis;
        r["threshold"] = *o.threshold;
        if (command == "sdp" && !o.hidden.empty()) r["hidden"] = name_list(o.hidden);
    }
    if (command == "explain") {
        json q = {{"kind", o.question}};
        if (!o.target.empty()) q["target"] = o.target;
        if (!o.cause.empty()) q["cause"] = o.cause;
        if (!o.competitor.empty()) q["competitor"] = o.competitor;
        if (!o.targets.empty()) q["targets"] = name_list(o.targets);
        if (o.top_k != 10) q["k"] = o.top_k;
        if (!o.hypothesis.empty()) q["hypothesis"] = o.hypothesis;
        if (o.threshold) q["threshold"] = *o.threshold;
        if (!o.hidden.empty()) q["hidden"] = name_list(o.hidden);
        r["question"] = std::move(q);
    }
    return r;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage:
        case ErrorKind::NotFound: return kExitUsage;
        default: return kExitComputation;
    }
}

int validate(const Options& o, std::ostream& out) {
    std::vector<ParseDiagnostic> warnings;
    const BayesianNetwork net = load_network(o.net, &warnings);
    if (o.format == "json") {
        json w = json::array();
        for (const auto& d : warnings) w.push_back(to_string(d));
        json vars = json::array();
        for (const auto& v : net.variables()) vars.push_back(v.name);
        out << canonical_dump({{"network", net.name()},
                               {"valid", true},
                               {"variables", vars},
                               {"arcs", net.arcs().size()},
                               {"warnings", w}})
            << '\n';
    } else {
        out << "network: " << net.name() << '\n'
            << "variables: " << net.size() << '\n'
            << "arcs: " << net.arcs().size() << '\n';
        for (const auto& d : warnings) out << "warning: " << to_string(d) << '\n';
        out << "valid\n";
    }
    return kExitOk;
}

int serve(const Options& o, std::ostream& out) {
    Service service;
    HttpServer server(service);
    const int port = server.start(o.host, o.port);
    out << "listening on http://" << o.host << ':' << port << std::endl;
    server.wait();
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    init_logging();
    Options o;
    CLI::App app{"Explainable Bayesian network engine", "xbn"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--net", o.net, "Network file (.bif or .json) or builtin:asia")->capture_default_str();
        sub->add_option("--format", o.format, "Output format")
            ->check(CLI::IsMember({"table", "json"}))
            ->capture_default_str();
    };
    auto with_evidence = [&](CLI::App* sub) {
        common(sub);
        sub->add_option("--evidence,-e", o.evidence, "Var=State, repeated or comma-separated")->delimiter(',');
    };
    auto with_hypothesis = [&](CLI::App* sub, bool required) {
        auto* h = sub->add_option("--hypothesis", o.hypothesis, "Hypothesis Var=State");
        auto* t = sub->add_option("--threshold", o.threshold, "Decision threshold in [0, 1]")
                      ->check(CLI::Range(0.0, 1.0));
        if (required) {
            h->required();
            t->required();
        }
    };

    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a network");
    common(validate_cmd);

    auto* query = app.add_subcommand("query", "Posterior marginals of target variables");
    with_evidence(query);
    query->add_option("--target,--targets", o.targets, "Target variables, or ALL")->delimiter(',')->required();

    auto* classify = app.add_subcommand("classify", "Classify the reasoning pattern of a query");
    with_evidence(classify);
    classify->add_option("--target", o.target, "Query variable")->required();

    auto* mpe = app.add_subcommand("mpe", "Most probable explanation");
    with_evidence(mpe);

    auto* map = app.add_subcommand("map", "Maximum a posteriori assignment of target variables");
    with_evidence(map);
    map->add_option("--targets,--target", o.targets, "Target variables, or ALL")->delimiter(',')->required();

    auto* gbf = app.add_subcommand("gbf", "Generalised Bayes factor of an explanation");
    with_evidence(gbf);
    gbf->add_option("--explanation", o.explanation, "Partial instantiation Var=State,...")->required();

    auto* mre = app.add_subcommand("mre", "Most relevant explanations ranked by GBF");
    with_evidence(mre);
    mre->add_option("--targets,--target", o.targets, "Target set, or ALL (default)")->delimiter(',');
    mre->add_option("--top-k,-k", o.top_k, "Number of explanations")->capture_default_str();
    mre->add_flag("--all-candidates", o.all_candidates, "Keep explanations dominated by a subset");

    auto* sdp = app.add_subcommand("sdp", "Same-decision probability");
    with_evidence(sdp);
    with_hypothesis(sdp, true);
    sdp->add_option("--hidden", o.hidden, "Hidden variables, or ALL")->delimiter(',');

    auto* decide = app.add_subcommand("decide", "Threshold decision on a hypothesis");
    with_evidence(decide);
    with_hypothesis(decide, true);

    auto* explain = app.add_subcommand("explain", "Answer a question from the explanation taxonomy");
    with_evidence(explain);
    explain->add_option("--question", o.question, "WhatWillHappen, WhatWentWrong, MutualCauses, "
                                                  "MostProbableScenario, MostRelevantExplanation, "
                                                  "ReadyToDecide or WhatMoreInfo")
        ->required();
    explain->add_option("--target", o.target, "Query variable");
    explain->add_option("--targets", o.targets, "Target set, or ALL")->delimiter(',');
    explain->add_option("--cause", o.cause, "Cause Var=State");
    explain->add_option("--competitor", o.competitor, "Competing cause Var=State");
    explain->add_option("--top-k,-k", o.top_k, "Number of explanations");
    with_hypothesis(explain, false);
    explain->add_option("--hidden", o.hidden, "Hidden variables, or ALL")->delimiter(',');

    auto* oracle = app.add_subcommand("oracle", "Cross-check inference against brute-force enumeration");
    with_evidence(oracle);
    oracle->add_option("--targets,--target", o.targets, "Target variables, or ALL (default)")->delimiter(',');

    auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
    serve_cmd->add_option("--host", o.host, "Address to bind")->capture_default_str();
    serve_cmd->add_option("--port", o.port, "Port to listen on")->check(CLI::Range(0, 65535))->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "validate") return validate(o, out);
        if (command == "serve") return serve(o, out);

        const auto start = std::chrono::steady_clock::now();
        const BayesianNetwork net = load_network(o.net);
        const json response = api::execute(net, build_request(command, o));
        spdlog::debug("{} took {:.3f} ms", command,
                      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
        if (o.format == "json")
            out << canonical_dump(response) << '\n';
        else
            out << api::render_table(response);
        return kExitOk;
    } catch (const Error& e) {
        err << "xbn: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "xbn: " << e.what() << '\n';
        return kExitComputation;
    }
}

}  // namespace xbn::cli
