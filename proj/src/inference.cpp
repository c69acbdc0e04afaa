#include "xbn/inference.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <set>

#include "xbn/error.hpp"

namespace xbn {

std::vector<double> Posterior::marginal(VarId v) const {
    VarId keep[] = {v};
    auto it = std::find(targets.begin(), targets.end(), v);
    if (it == targets.end()) throw UsageError("variable is not a posterior target");
    return distribution.marginal(keep).values();
}

double joint_probability(const BayesianNetwork& net, const Instantiation& inst) {
    if (inst.size() != net.size())
        throw UsageError("instantiation must assign every network variable");
    double p = 1.0;
    for (VarId v = 0; v < net.size(); ++v) {
        if (inst[v] >= net.cardinality(v))
            throw UsageError("invalid state index for variable '" + net.variable(v).name + "'");
        const Cpt& cpt = net.cpt(v);
        std::size_t row = 0;
        for (VarId parent : cpt.parents()) row = row * net.cardinality(parent) + inst[parent];
        p *= cpt.probability(row, inst[v]);
    }
    return p;
}

Factor enumerate_distribution(const BayesianNetwork& net, const Evidence& evidence) {
    check_assignment(net, evidence);
    std::vector<VarId> free;
    std::vector<std::size_t> cards;
    std::size_t space = 1;
    for (VarId v = 0; v < net.size(); ++v) {
        if (evidence.contains(v)) continue;
        free.push_back(v);
        cards.push_back(net.cardinality(v));
        space *= net.cardinality(v);
        if (space > kEnumerationLimit)
            throw GuardExceededError("enumeration exceeds the 2^25 joint-state limit");
    }

    Instantiation inst(net.size(), 0);
    for (auto [v, s] : evidence) inst[v] = s;
    std::vector<double> values(space);
    for (std::size_t i = 0; i < space; ++i) {
        values[i] = joint_probability(net, inst);
        for (std::size_t k = free.size(); k-- > 0;) {
            if (++inst[free[k]] < cards[k]) break;
            inst[free[k]] = 0;
        }
    }
    return Factor(std::move(free), std::move(cards), std::move(values));
}

std::vector<VarId> min_fill_order(const std::vector<Factor>& factors, std::vector<VarId> vars) {
    std::set<VarId> remaining(vars.begin(), vars.end());
    std::map<VarId, std::set<VarId>> adj;
    for (const auto& f : factors)
        for (VarId a : f.scope()) {
            adj[a];
            for (VarId b : f.scope())
                if (a != b) adj[a].insert(b);
        }

    std::vector<VarId> order;
    while (!remaining.empty()) {
        VarId best = *remaining.begin();
        std::size_t best_fill = SIZE_MAX;
        for (VarId v : remaining) {
            const auto& nb = adj[v];
            std::size_t fill = 0;
            for (auto i = nb.begin(); i != nb.end(); ++i)
                for (auto j = std::next(i); j != nb.end(); ++j)
                    if (!adj[*i].count(*j)) ++fill;
            if (fill < best_fill) {
                best_fill = fill;
                best = v;
            }
        }
        const auto nb = adj[best];
        for (VarId a : nb) {
            adj[a].erase(best);
            for (VarId b : nb)
                if (a != b) adj[a].insert(b);
        }
        adj.erase(best);
        remaining.erase(best);
        order.push_back(best);
    }
    return order;
}

namespace {

void check_targets(const BayesianNetwork& net, const std::vector<VarId>& targets,
                   const Evidence& evidence) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= net.size()) throw UsageError("unknown target variable");
        if (evidence.contains(targets[i]))
            throw UsageError("target '" + net.variable(targets[i]).name + "' is also observed");
        for (std::size_t j = 0; j < i; ++j)
            if (targets[j] == targets[i])
                throw UsageError("target '" + net.variable(targets[i]).name + "' listed twice");
    }
}

Factor multiply_all(const std::vector<Factor>& factors) {
    Factor out;
    for (const auto& f : factors) out = out.product(f);
    return out;
}

}  // namespace

Factor joint_with_evidence(const BayesianNetwork& net, std::vector<VarId> targets,
                           const Evidence& evidence) {
    check_assignment(net, evidence);
    check_targets(net, targets, evidence);
    std::sort(targets.begin(), targets.end());

    // Only ancestors of the query and evidence matter; barren descendants sum to one.
    std::vector<VarId> query = targets;
    for (VarId v : evidence.variables()) query.push_back(v);
    std::vector<bool> relevant = net.ancestors_of(query);
    for (VarId v : query) relevant[v] = true;

    std::vector<Factor> factors;
    std::vector<VarId> hidden;
    for (VarId v = 0; v < net.size(); ++v) {
        if (!relevant[v]) continue;
        factors.push_back(Factor::from_cpt(net, v).reduce(evidence));
        if (!evidence.contains(v) && !std::binary_search(targets.begin(), targets.end(), v))
            hidden.push_back(v);
    }

    for (VarId v : min_fill_order(factors, hidden)) {
        std::vector<Factor> touching, rest;
        for (auto& f : factors) (f.contains(v) ? touching : rest).push_back(std::move(f));
        rest.push_back(multiply_all(touching).sum_out(v));
        factors = std::move(rest);
    }
    return multiply_all(factors);
}

double evidence_probability(const BayesianNetwork& net, const Evidence& evidence) {
    return joint_with_evidence(net, {}, evidence).total();
}

Posterior posterior(const BayesianNetwork& net, std::vector<VarId> targets, const Evidence& evidence) {
    if (targets.empty()) throw UsageError("posterior requires at least one target");
    Posterior out;
    out.distribution = joint_with_evidence(net, targets, evidence);
    out.evidence_probability = out.distribution.total();
    if (!(out.evidence_probability > 0.0)) throw ImpossibleEvidenceError();
    out.distribution.normalize();
    std::sort(targets.begin(), targets.end());
    out.targets = std::move(targets);
    out.evidence = evidence;
    return out;
}

MaxAssignment max_joint_assignment(const BayesianNetwork& net, const Evidence& evidence) {
    check_assignment(net, evidence);
    std::vector<Factor> factors;
    std::vector<VarId> free;
    for (VarId v = 0; v < net.size(); ++v) {
        factors.push_back(Factor::from_cpt(net, v).reduce(evidence));
        if (!evidence.contains(v)) free.push_back(v);
    }

    std::vector<std::pair<VarId, Factor>> trace;
    for (VarId v : min_fill_order(factors, free)) {
        std::vector<Factor> touching, rest;
        for (auto& f : factors) (f.contains(v) ? touching : rest).push_back(std::move(f));
        Factor combined = multiply_all(touching);
        rest.push_back(combined.max_out(v));
        trace.emplace_back(v, std::move(combined));
        factors = std::move(rest);
    }

    MaxAssignment out;
    out.joint = multiply_all(factors).total();
    if (!(out.joint > 0.0)) throw ImpossibleEvidenceError();

    // Later-eliminated variables are fixed first, so every other variable in
    // a traced factor's scope is already assigned when we reach it.
    for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
        const auto& [v, f] = *it;
        std::vector<StateId> states;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < f.scope().size(); ++i) {
            if (f.scope()[i] == v) {
                pos = i;
                states.push_back(0);
            } else {
                states.push_back(out.assignment.get(f.scope()[i]).value());
            }
        }
        StateId best = 0;
        double best_value = -1.0;
        for (StateId s = 0; s < net.cardinality(v); ++s) {
            states[pos] = s;
            double value = f.at(states);
            if (value > best_value) {
                best_value = value;
                best = s;
            }
        }
        out.assignment.set(v, best);
    }
    return out;
}

bool d_separated(const BayesianNetwork& net, const std::vector<VarId>& x,
                 const std::vector<VarId>& y, const std::vector<VarId>& z) {
    if (x.empty() || y.empty()) throw UsageError("d-separation requires nonempty X and Y");
    std::vector<int> owner(net.size(), -1);
    for (const auto* set : {&x, &y, &z})
        for (VarId v : *set) {
            if (v >= net.size()) throw UsageError("unknown variable id");
            int id = set == &x ? 0 : set == &y ? 1 : 2;
            if (owner[v] != -1 && owner[v] != id)
                throw UsageError("variable '" + net.variable(v).name +
                                 "' appears in more than one of X, Y, Z");
            owner[v] = id;
        }

    std::vector<bool> observed(net.size(), false);
    for (VarId v : z) observed[v] = true;
    // Observed nodes and their ancestors activate colliders.
    std::vector<bool> activates = net.ancestors_of(z);
    for (VarId v : z) activates[v] = true;

    // (node, arrived_from_child) states of the active-trail search.
    enum Dir { Up = 0, Down = 1 };
    std::vector<std::array<bool, 2>> visited(net.size(), {false, false});
    std::deque<std::pair<VarId, Dir>> queue;
    for (VarId v : x) queue.emplace_back(v, Up);

    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (!observed[v] && owner[v] == 1) return false;

        if (dir == Up && !observed[v]) {
            for (VarId p : net.parents(v)) queue.emplace_back(p, Up);
            for (VarId c : net.children(v)) queue.emplace_back(c, Down);
        } else if (dir == Down) {
            if (!observed[v])
                for (VarId c : net.children(v)) queue.emplace_back(c, Down);
            if (activates[v])
                for (VarId p : net.parents(v)) queue.emplace_back(p, Up);
        }
    }
    return true;
}

}  // namespace xbn
