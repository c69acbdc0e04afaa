#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xbn {

using VarId = std::size_t;
using StateId = std::size_t;

struct Variable {
    std::string name;
    std::vector<std::string> states;
    /// Short display label (e.g. a single letter); optional.
    std::string alias;

    std::size_t cardinality() const noexcept { return states.size(); }
    std::optional<StateId> find_state(std::string_view label) const;

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Unvalidated CPT as written in a document: variables referenced by name,
/// one row per parent-state combination counting the last parent fastest.
struct CptSpec {
    std::string child;
    std::vector<std::string> parents;
    std::vector<std::vector<double>> rows;
};

class Cpt {
public:
    Cpt(VarId child, std::vector<VarId> parents, std::size_t child_cardinality,
        std::size_t row_count, std::vector<double> values);

    VarId child() const noexcept { return child_; }
    const std::vector<VarId>& parents() const noexcept { return parents_; }
    std::size_t row_count() const noexcept { return row_count_; }
    std::size_t child_cardinality() const noexcept { return child_card_; }

    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * child_card_, child_card_};
    }
    double probability(std::size_t r, StateId s) const { return values_[r * child_card_ + s]; }

    /// Flat values, row-major (child state fastest).
    const std::vector<double>& values() const noexcept { return values_; }

private:
    VarId child_;
    std::vector<VarId> parents_;
    std::size_t child_card_;
    std::size_t row_count_;
    std::vector<double> values_;
};

/// A validated discrete Bayesian network. Immutable once built; construct
/// through build_network().
class BayesianNetwork {
public:
    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return variables_.size(); }

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const Variable& variable(VarId v) const { return variables_.at(v); }
    std::size_t cardinality(VarId v) const { return variables_.at(v).cardinality(); }

    const Cpt& cpt(VarId v) const { return cpts_.at(v); }
    const std::vector<VarId>& parents(VarId v) const { return cpts_.at(v).parents(); }
    const std::vector<VarId>& children(VarId v) const { return children_.at(v); }

    std::optional<VarId> find(std::string_view name) const;
    /// Throws UsageError("unknown variable 'X'").
    VarId index_of(std::string_view name) const;
    /// Throws UsageError for labels that are not declared states of `v`.
    StateId state_index(VarId v, std::string_view label) const;

    /// Parents before children; ties broken by declaration order.
    const std::vector<VarId>& topological_order() const noexcept { return topo_; }

    /// (parent, child) pairs in child declaration order, then parent order.
    std::vector<std::pair<VarId, VarId>> arcs() const;

    bool is_ancestor(VarId ancestor, VarId of) const;
    std::vector<bool> ancestors_of(std::span<const VarId> vars) const;
    std::vector<bool> descendants_of(VarId v) const;

private:
    friend BayesianNetwork build_network(std::string, std::vector<Variable>, std::vector<CptSpec>);

    std::string name_;
    std::vector<Variable> variables_;
    std::vector<Cpt> cpts_;  // indexed by child VarId
    std::vector<std::vector<VarId>> children_;
    std::vector<VarId> topo_;
};

constexpr double kRowSumTolerance = 1e-9;

/// Validates and assembles a network. Rows within kRowSumTolerance of 1 are
/// renormalized. Throws ValidationError naming the offending variable.
BayesianNetwork build_network(std::string name, std::vector<Variable> variables,
                              std::vector<CptSpec> cpts);

std::vector<VarId> topological_order(const BayesianNetwork& net);

/// Same variables, states, aliases, parents, and probabilities within `tol`.
bool approx_equal(const BayesianNetwork& a, const BayesianNetwork& b, double tol = 1e-12);

/// Sparse variable -> state map, kept sorted by variable id. Used for
/// evidence, explanations and hidden-variable branches alike.
class Assignment {
public:
    using Entry = std::pair<VarId, StateId>;

    Assignment() = default;
    Assignment(std::initializer_list<Entry> entries);

    /// Adds v=s. Throws UsageError if v is already assigned.
    void set(VarId v, StateId s);
    void erase(VarId v);
    std::optional<StateId> get(VarId v) const;
    bool contains(VarId v) const { return get(v).has_value(); }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::vector<VarId> variables() const;

    /// Union; throws UsageError if the two disagree or overlap.
    Assignment merged(const Assignment& other) const;

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend auto operator<=>(const Assignment&, const Assignment&) = default;

private:
    std::vector<Entry> entries_;
};

using Evidence = Assignment;
using PartialInstantiation = Assignment;

/// Total assignment, indexed by VarId.
using Instantiation = std::vector<StateId>;

/// Resolves (variable, state) name pairs; throws UsageError on unknown
/// names or a repeated variable.
Assignment make_assignment(const BayesianNetwork& net,
                           const std::vector<std::pair<std::string, std::string>>& pairs);

/// Parses "Var=State,Var2=State2" (whitespace tolerant, empty string allowed).
Assignment parse_assignment(const BayesianNetwork& net, std::string_view text);

/// "Var=State, Var2=State2" in declaration order.
std::string describe(const BayesianNetwork& net, const Assignment& a);

/// Throws UsageError unless every entry names a valid variable and state.
void check_assignment(const BayesianNetwork& net, const Assignment& a);

std::vector<VarId> resolve_variables(const BayesianNetwork& net,
                                     const std::vector<std::string>& names);

}  // namespace xbn
