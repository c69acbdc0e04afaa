#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "xbn/format.hpp"
#include "xbn/json_io.hpp"

namespace xbn {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
    throw ParseError({1, 1, path + ": " + message, ParseDiagnostic::Severity::Error});
}

const json& member(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing member '") + key + "'");
    return *it;
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) schema_error(path, "expected a string");
    return j.get<std::string>();
}

std::vector<std::string> as_strings(const json& j, const std::string& path) {
    if (!j.is_array()) schema_error(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

// Maps a byte offset reported by the JSON parser onto line/column.
ParseDiagnostic locate(std::string_view text, std::size_t offset, std::string message) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col, std::move(message), ParseDiagnostic::Severity::Error};
}

}  // namespace

BayesianNetwork parse_network_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(locate(text, e.byte == 0 ? 0 : e.byte - 1, e.what()));
    }
    if (!doc.is_object()) schema_error("$", "expected an object");

    std::string name = doc.contains("name") ? as_string(doc["name"], "$.name") : std::string();

    const json& vars = member(doc, "variables", "$");
    if (!vars.is_array()) schema_error("$.variables", "expected an array");
    std::vector<Variable> variables;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string path = "$.variables[" + std::to_string(i) + "]";
        const json& v = vars[i];
        if (!v.is_object()) schema_error(path, "expected an object");
        Variable var;
        var.name = as_string(member(v, "name", path), path + ".name");
        var.states = as_strings(member(v, "states", path), path + ".states");
        if (v.contains("alias")) var.alias = as_string(v["alias"], path + ".alias");
        variables.push_back(std::move(var));
    }

    const json& tables = member(doc, "cpts", "$");
    if (!tables.is_array()) schema_error("$.cpts", "expected an array");
    std::vector<CptSpec> cpts;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const std::string path = "$.cpts[" + std::to_string(i) + "]";
        const json& t = tables[i];
        if (!t.is_object()) schema_error(path, "expected an object");
        CptSpec spec;
        spec.child = as_string(member(t, "child", path), path + ".child");
        spec.parents = t.contains("parents") ? as_strings(t["parents"], path + ".parents")
                                             : std::vector<std::string>{};
        const json& rows = member(t, "rows", path);
        if (!rows.is_array()) schema_error(path + ".rows", "expected an array of rows");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::string rpath = path + ".rows[" + std::to_string(r) + "]";
            if (!rows[r].is_array()) schema_error(rpath, "expected an array of numbers");
            std::vector<double> row;
            for (const auto& p : rows[r]) {
                if (!p.is_number()) schema_error(rpath, "expected an array of numbers");
                row.push_back(p.get<double>());
            }
            spec.rows.push_back(std::move(row));
        }
        cpts.push_back(std::move(spec));
    }
    return build_network(std::move(name), std::move(variables), std::move(cpts));
}

json network_to_json(const BayesianNetwork& net) {
    json vars = json::array();
    for (const auto& v : net.variables()) {
        json jv = {{"name", v.name}, {"states", v.states}};
        if (!v.alias.empty()) jv["alias"] = v.alias;
        vars.push_back(std::move(jv));
    }
    json cpts = json::array();
    for (VarId c = 0; c < net.size(); ++c) {
        const Cpt& cpt = net.cpt(c);
        json parents = json::array();
        for (VarId p : cpt.parents()) parents.push_back(net.variable(p).name);
        json rows = json::array();
        for (std::size_t r = 0; r < cpt.row_count(); ++r) {
            auto row = cpt.row(r);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        cpts.push_back({{"child", net.variable(c).name}, {"parents", parents}, {"rows", rows}});
    }
    return {{"name", net.name()}, {"variables", vars}, {"cpts", cpts}};
}

std::string write_network_json(const BayesianNetwork& net) { return network_to_json(net).dump(2) + "\n"; }

BayesianNetwork parse_network(std::string_view text, std::vector<ParseDiagnostic>* warnings) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return parse_network_json(text);
        break;
    }
    return parse_bif(text, warnings);
}

BayesianNetwork load_network(const std::string& source, std::vector<ParseDiagnostic>* warnings) {
    if (source == kBuiltinAsia) return builtin_asia();
    std::ifstream in(source, std::ios::binary);
    if (!in) throw NotFoundError("cannot open network file '" + source + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str(), warnings);
}

BayesianNetwork builtin_asia() {
    const std::vector<std::string> yes_no = {"yes", "no"};
    std::vector<Variable> vars = {
        {"VisitToAsia", yes_no, "A"},  {"Tuberculosis", yes_no, "T"},
        {"Smoker", yes_no, "S"},       {"LungCancer", yes_no, "C"},
        {"Bronchitis", yes_no, "B"},   {"TbOrCancer", yes_no, "P"},
        {"XRay", {"abnormal", "normal"}, "X"}, {"Dyspnoea", yes_no, "D"},
    };
    std::vector<CptSpec> cpts = {
        {"VisitToAsia", {}, {{0.01, 0.99}}},
        {"Tuberculosis", {"VisitToAsia"}, {{0.05, 0.95}, {0.01, 0.99}}},
        {"Smoker", {}, {{0.5, 0.5}}},
        {"LungCancer", {"Smoker"}, {{0.10, 0.90}, {0.01, 0.99}}},
        {"Bronchitis", {"Smoker"}, {{0.60, 0.40}, {0.30, 0.70}}},
        // Deterministic OR of Tuberculosis and LungCancer.
        {"TbOrCancer", {"Tuberculosis", "LungCancer"}, {{1, 0}, {1, 0}, {1, 0}, {0, 1}}},
        {"XRay", {"TbOrCancer"}, {{0.98, 0.02}, {0.05, 0.95}}},
        {"Dyspnoea", {"Bronchitis", "TbOrCancer"}, {{0.9, 0.1}, {0.8, 0.2}, {0.7, 0.3}, {0.1, 0.9}}},
    };
    return build_network("Asia", std::move(vars), std::move(cpts));
}

}  // namespace xbn
