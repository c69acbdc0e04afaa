#pragma once

#include <span>
#include <vector>

#include "xbn/model.hpp"

namespace xbn {

/// Nonnegative table over a set of variables. The scope is kept sorted by
/// VarId and values are laid out with the last scope variable fastest.
class Factor {
public:
    /// The unit scalar factor.
    Factor() : values_{1.0} {}
    Factor(std::vector<VarId> scope, std::vector<std::size_t> cards, std::vector<double> values);

    static Factor scalar(double value);
    /// The CPT of `v` as a factor over its family.
    static Factor from_cpt(const BayesianNetwork& net, VarId v);

    const std::vector<VarId>& scope() const noexcept { return scope_; }
    const std::vector<std::size_t>& cards() const noexcept { return cards_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    bool contains(VarId v) const;
    double total() const;

    /// Index of a full assignment to the scope, states listed in scope order.
    std::size_t index_of(std::span<const StateId> states) const;
    double at(std::span<const StateId> states) const { return values_[index_of(states)]; }
    /// Reads the entry matching `a`, which must cover the scope.
    double at(const Assignment& a) const;

    Factor product(const Factor& other) const;
    Factor sum_out(VarId v) const;
    Factor max_out(VarId v) const;
    /// Restricts `v` to `state` and drops it from the scope.
    Factor reduce(VarId v, StateId state) const;
    Factor reduce(const Assignment& evidence) const;
    /// Marginal over `keep` (a subset of the scope).
    Factor marginal(std::span<const VarId> keep) const;

    void normalize();

private:
    Factor eliminate(VarId v, bool use_max) const;

    std::vector<VarId> scope_;
    std::vector<std::size_t> cards_;
    std::vector<double> values_;
};

}  // namespace xbn
