#include "xbn/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "xbn/error.hpp"

namespace xbn {

std::string to_string(const ParseDiagnostic& d) {
    std::ostringstream os;
    os << d.line << ':' << d.column << ": "
       << (d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning") << ": "
       << d.message;
    return os.str();
}

std::optional<StateId> Variable::find_state(std::string_view label) const {
    for (StateId s = 0; s < states.size(); ++s)
        if (states[s] == label) return s;
    return std::nullopt;
}

Cpt::Cpt(VarId child, std::vector<VarId> parents, std::size_t child_cardinality,
         std::size_t row_count, std::vector<double> values)
    : child_(child),
      parents_(std::move(parents)),
      child_card_(child_cardinality),
      row_count_(row_count),
      values_(std::move(values)) {}

std::optional<VarId> BayesianNetwork::find(std::string_view name) const {
    for (VarId v = 0; v < variables_.size(); ++v)
        if (variables_[v].name == name) return v;
    return std::nullopt;
}

VarId BayesianNetwork::index_of(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw UsageError("unknown variable '" + std::string(name) + "'");
}

StateId BayesianNetwork::state_index(VarId v, std::string_view label) const {
    const Variable& var = variable(v);
    if (auto s = var.find_state(label)) return *s;
    throw UsageError("unknown state '" + std::string(label) + "' for variable '" + var.name + "'");
}

std::vector<std::pair<VarId, VarId>> BayesianNetwork::arcs() const {
    std::vector<std::pair<VarId, VarId>> out;
    for (VarId c = 0; c < size(); ++c)
        for (VarId p : parents(c)) out.emplace_back(p, c);
    return out;
}

std::vector<bool> BayesianNetwork::ancestors_of(std::span<const VarId> vars) const {
    std::vector<bool> mark(size(), false);
    std::vector<VarId> stack;
    for (VarId v : vars)
        for (VarId p : parents(v)) stack.push_back(p);
    while (!stack.empty()) {
        VarId v = stack.back();
        stack.pop_back();
        if (mark[v]) continue;
        mark[v] = true;
        for (VarId p : parents(v)) stack.push_back(p);
    }
    return mark;
}

std::vector<bool> BayesianNetwork::descendants_of(VarId v) const {
    std::vector<bool> mark(size(), false);
    std::vector<VarId> stack(children(v).begin(), children(v).end());
    while (!stack.empty()) {
        VarId u = stack.back();
        stack.pop_back();
        if (mark[u]) continue;
        mark[u] = true;
        for (VarId c : children(u)) stack.push_back(c);
    }
    return mark;
}

bool BayesianNetwork::is_ancestor(VarId ancestor, VarId of) const {
    VarId one[] = {of};
    return ancestors_of(one)[ancestor];
}

namespace {

void validate_variable(const Variable& v) {
    if (v.name.empty()) throw ValidationError("", "variable name must be nonempty");
    if (v.states.size() < 2)
        throw ValidationError(v.name, "variable '" + v.name + "' must declare at least 2 states");
    std::set<std::string> seen;
    for (const auto& s : v.states) {
        if (s.empty())
            throw ValidationError(v.name, "variable '" + v.name + "' has an empty state label");
        if (!seen.insert(s).second)
            throw ValidationError(v.name,
                                  "variable '" + v.name + "' declares state '" + s + "' twice");
    }
}

}  // namespace

BayesianNetwork build_network(std::string name, std::vector<Variable> variables,
                              std::vector<CptSpec> cpts) {
    if (variables.empty())
        throw ValidationError("", "network must contain at least one variable");

    std::map<std::string, VarId, std::less<>> index;
    for (VarId v = 0; v < variables.size(); ++v) {
        validate_variable(variables[v]);
        if (!index.emplace(variables[v].name, v).second)
            throw ValidationError(variables[v].name,
                                  "variable '" + variables[v].name + "' declared twice");
    }

    std::vector<std::optional<Cpt>> slots(variables.size());
    for (auto& spec : cpts) {
        auto it = index.find(spec.child);
        if (it == index.end())
            throw ValidationError(spec.child,
                                  "probability table for undeclared variable '" + spec.child + "'");
        const VarId child = it->second;
        if (slots[child])
            throw ValidationError(spec.child, "duplicate probability table for '" + spec.child + "'");

        std::vector<VarId> parents;
        std::size_t rows = 1;
        for (const auto& pname : spec.parents) {
            auto pit = index.find(pname);
            if (pit == index.end())
                throw ValidationError(spec.child, "variable '" + spec.child +
                                                      "' has unknown parent '" + pname + "'");
            if (pit->second == child)
                throw ValidationError(spec.child,
                                      "cycle detected: '" + spec.child + "' is its own parent");
            if (std::find(parents.begin(), parents.end(), pit->second) != parents.end())
                throw ValidationError(spec.child, "variable '" + spec.child +
                                                      "' lists parent '" + pname + "' twice");
            parents.push_back(pit->second);
            rows *= variables[pit->second].cardinality();
        }

        const std::size_t card = variables[child].cardinality();
        if (spec.rows.size() != rows)
            throw ValidationError(spec.child, "variable '" + spec.child + "' expects " +
                                                  std::to_string(rows) + " probability rows, got " +
                                                  std::to_string(spec.rows.size()));
        std::vector<double> values;
        values.reserve(rows * card);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto& row = spec.rows[r];
            if (row.size() != card)
                throw ValidationError(spec.child, "variable '" + spec.child + "' row " +
                                                      std::to_string(r) + " has " +
                                                      std::to_string(row.size()) +
                                                      " entries, expected " + std::to_string(card));
            double sum = 0.0;
            for (double p : row) {
                if (!std::isfinite(p) || p < 0.0 || p > 1.0)
                    throw ValidationError(spec.child, "variable '" + spec.child + "' row " +
                                                          std::to_string(r) +
                                                          " has an entry outside [0, 1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance) {
                std::ostringstream os;
                os.precision(12);
                os << "variable '" << spec.child << "' row " << r << " sums to " << sum
                   << ", expected 1";
                throw ValidationError(spec.child, os.str());
            }
            const bool exact = std::abs(sum - 1.0) <= 1e-14;
            for (double p : row) values.push_back(exact ? p : p / sum);
        }
        slots[child].emplace(child, std::move(parents), card, rows, std::move(values));
    }

    BayesianNetwork net;
    net.name_ = std::move(name);
    net.variables_ = std::move(variables);
    net.cpts_.reserve(slots.size());
    for (VarId v = 0; v < slots.size(); ++v) {
        if (!slots[v])
            throw ValidationError(net.variables_[v].name,
                                  "missing probability table for '" + net.variables_[v].name + "'");
        net.cpts_.push_back(std::move(*slots[v]));
    }
    net.children_.assign(net.size(), {});
    for (VarId c = 0; c < net.size(); ++c)
        for (VarId p : net.cpts_[c].parents()) net.children_[p].push_back(c);

    // Kahn's algorithm with a min-heap on VarId keeps the order deterministic.
    std::vector<std::size_t> indegree(net.size());
    std::priority_queue<VarId, std::vector<VarId>, std::greater<>> ready;
    for (VarId v = 0; v < net.size(); ++v) {
        indegree[v] = net.cpts_[v].parents().size();
        if (indegree[v] == 0) ready.push(v);
    }
    while (!ready.empty()) {
        VarId v = ready.top();
        ready.pop();
        net.topo_.push_back(v);
        for (VarId c : net.children_[v])
            if (--indegree[c] == 0) ready.push(c);
    }
    if (net.topo_.size() != net.size()) {
        VarId culprit = 0;
        while (indegree[culprit] == 0) ++culprit;
        throw ValidationError(net.variables_[culprit].name,
                              "cycle detected involving '" + net.variables_[culprit].name + "'");
    }
    return net;
}

std::vector<VarId> topological_order(const BayesianNetwork& net) { return net.topological_order(); }

bool approx_equal(const BayesianNetwork& a, const BayesianNetwork& b, double tol) {
    if (a.name() != b.name() || a.variables() != b.variables()) return false;
    for (VarId v = 0; v < a.size(); ++v) {
        const Cpt& ca = a.cpt(v);
        const Cpt& cb = b.cpt(v);
        if (ca.parents() != cb.parents() || ca.values().size() != cb.values().size()) return false;
        for (std::size_t i = 0; i < ca.values().size(); ++i)
            if (std::abs(ca.values()[i] - cb.values()[i]) > tol) return false;
    }
    return true;
}

Assignment::Assignment(std::initializer_list<Entry> entries) {
    for (auto [v, s] : entries) set(v, s);
}

void Assignment::set(VarId v, StateId s) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), v,
                               [](const Entry& e, VarId key) { return e.first < key; });
    if (it != entries_.end() && it->first == v)
        throw UsageError("variable assigned more than once");
    entries_.insert(it, {v, s});
}

void Assignment::erase(VarId v) {
    std::erase_if(entries_, [v](const Entry& e) { return e.first == v; });
}

std::optional<StateId> Assignment::get(VarId v) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), v,
                               [](const Entry& e, VarId key) { return e.first < key; });
    if (it != entries_.end() && it->first == v) return it->second;
    return std::nullopt;
}

std::vector<VarId> Assignment::variables() const {
    std::vector<VarId> out;
    out.reserve(entries_.size());
    for (auto [v, s] : entries_) out.push_back(v);
    return out;
}

Assignment Assignment::merged(const Assignment& other) const {
    Assignment out = *this;
    for (auto [v, s] : other) out.set(v, s);
    return out;
}

Assignment make_assignment(const BayesianNetwork& net,
                           const std::vector<std::pair<std::string, std::string>>& pairs) {
    Assignment out;
    for (const auto& [var, state] : pairs) {
        VarId v = net.index_of(var);
        StateId s = net.state_index(v, state);
        if (out.contains(v)) throw UsageError("variable '" + var + "' assigned more than once");
        out.set(v, s);
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Assignment parse_assignment(const BayesianNetwork& net, std::string_view text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    while (!trim(text).empty()) {
        auto comma = text.find(',');
        std::string_view item = trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("expected Var=State, got '" + std::string(item) + "'");
        pairs.emplace_back(std::string(trim(item.substr(0, eq))),
                           std::string(trim(item.substr(eq + 1))));
    }
    return make_assignment(net, pairs);
}

std::string describe(const BayesianNetwork& net, const Assignment& a) {
    std::string out;
    for (auto [v, s] : a) {
        if (!out.empty()) out += ", ";
        out += net.variable(v).name + "=" + net.variable(v).states[s];
    }
    return out;
}

void check_assignment(const BayesianNetwork& net, const Assignment& a) {
    for (auto [v, s] : a) {
        if (v >= net.size()) throw UsageError("unknown variable id " + std::to_string(v));
        if (s >= net.cardinality(v))
            throw UsageError("invalid state index for variable '" + net.variable(v).name + "'");
    }
}

std::vector<VarId> resolve_variables(const BayesianNetwork& net,
                                     const std::vector<std::string>& names) {
    std::vector<VarId> out;
    for (const auto& n : names) {
        VarId v = net.index_of(n);
        if (std::find(out.begin(), out.end(), v) != out.end())
            throw UsageError("variable '" + n + "' listed more than once");
        out.push_back(v);
    }
    return out;
}

}  // namespace xbn
