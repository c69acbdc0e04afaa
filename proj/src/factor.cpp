#include "xbn/factor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace xbn {

namespace {

std::vector<std::size_t> strides_for(const std::vector<std::size_t>& cards) {
    std::vector<std::size_t> strides(cards.size(), 1);
    for (std::size_t i = cards.size(); i-- > 1;) strides[i - 1] = strides[i] * cards[i];
    return strides;
}

std::size_t product_of(const std::vector<std::size_t>& cards) {
    return std::accumulate(cards.begin(), cards.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Factor::Factor(std::vector<VarId> scope, std::vector<std::size_t> cards, std::vector<double> values)
    : scope_(std::move(scope)), cards_(std::move(cards)), values_(std::move(values)) {
    if (scope_.size() != cards_.size() || !std::is_sorted(scope_.begin(), scope_.end()) ||
        product_of(cards_) != values_.size())
        throw std::invalid_argument("inconsistent factor layout");
}

Factor Factor::scalar(double value) {
    Factor f;
    f.values_ = {value};
    return f;
}

Factor Factor::from_cpt(const BayesianNetwork& net, VarId v) {
    const Cpt& cpt = net.cpt(v);
    std::vector<VarId> scope = cpt.parents();
    scope.push_back(v);
    std::sort(scope.begin(), scope.end());
    std::vector<std::size_t> cards;
    for (VarId u : scope) cards.push_back(net.cardinality(u));

    // Position of each CPT parent (and the child) within the sorted scope.
    std::vector<std::size_t> parent_pos;
    for (VarId p : cpt.parents())
        parent_pos.push_back(std::find(scope.begin(), scope.end(), p) - scope.begin());
    const std::size_t child_pos = std::find(scope.begin(), scope.end(), v) - scope.begin();

    std::vector<double> values(product_of(cards));
    std::vector<StateId> states(scope.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t row = 0;
        for (std::size_t k = 0; k < parent_pos.size(); ++k)
            row = row * net.cardinality(cpt.parents()[k]) + states[parent_pos[k]];
        values[i] = cpt.probability(row, states[child_pos]);
        for (std::size_t k = states.size(); k-- > 0;) {
            if (++states[k] < cards[k]) break;
            states[k] = 0;
        }
    }
    return Factor(std::move(scope), std::move(cards), std::move(values));
}

bool Factor::contains(VarId v) const { return std::binary_search(scope_.begin(), scope_.end(), v); }

double Factor::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

std::size_t Factor::index_of(std::span<const StateId> states) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < scope_.size(); ++i) index = index * cards_[i] + states[i];
    return index;
}

double Factor::at(const Assignment& a) const {
    std::vector<StateId> states;
    for (VarId v : scope_) states.push_back(a.get(v).value());
    return values_[index_of(states)];
}

Factor Factor::product(const Factor& other) const {
    std::vector<VarId> scope;
    std::set_union(scope_.begin(), scope_.end(), other.scope_.begin(), other.scope_.end(),
                   std::back_inserter(scope));
    std::vector<std::size_t> cards;
    // Per result position: stride into this/other (0 when absent).
    std::vector<std::size_t> stride_a, stride_b;
    const auto sa = strides_for(cards_);
    const auto sb = strides_for(other.cards_);
    for (VarId v : scope) {
        auto ia = std::lower_bound(scope_.begin(), scope_.end(), v);
        auto ib = std::lower_bound(other.scope_.begin(), other.scope_.end(), v);
        bool in_a = ia != scope_.end() && *ia == v;
        bool in_b = ib != other.scope_.end() && *ib == v;
        cards.push_back(in_a ? cards_[ia - scope_.begin()] : other.cards_[ib - other.scope_.begin()]);
        stride_a.push_back(in_a ? sa[ia - scope_.begin()] : 0);
        stride_b.push_back(in_b ? sb[ib - other.scope_.begin()] : 0);
    }

    std::vector<double> values(product_of(cards));
    std::vector<StateId> states(scope.size(), 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = values_[ia] * other.values_[ib];
        for (std::size_t k = states.size(); k-- > 0;) {
            if (++states[k] < cards[k]) {
                ia += stride_a[k];
                ib += stride_b[k];
                break;
            }
            ia -= stride_a[k] * (cards[k] - 1);
            ib -= stride_b[k] * (cards[k] - 1);
            states[k] = 0;
        }
    }
    return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor Factor::eliminate(VarId v, bool use_max) const {
    auto it = std::lower_bound(scope_.begin(), scope_.end(), v);
    if (it == scope_.end() || *it != v) return *this;
    const std::size_t pos = it - scope_.begin();
    const auto strides = strides_for(cards_);
    const std::size_t inner = strides[pos];
    const std::size_t card = cards_[pos];
    const std::size_t outer = values_.size() / (inner * card);

    std::vector<VarId> scope = scope_;
    std::vector<std::size_t> cards = cards_;
    scope.erase(scope.begin() + pos);
    cards.erase(cards.begin() + pos);

    std::vector<double> values(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t s = 0; s < card; ++s)
            for (std::size_t i = 0; i < inner; ++i) {
                double x = values_[(o * card + s) * inner + i];
                double& acc = values[o * inner + i];
                if (use_max)
                    acc = s == 0 ? x : std::max(acc, x);
                else
                    acc += x;
            }
    return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor Factor::sum_out(VarId v) const { return eliminate(v, false); }
Factor Factor::max_out(VarId v) const { return eliminate(v, true); }

Factor Factor::reduce(VarId v, StateId state) const {
    auto it = std::lower_bound(scope_.begin(), scope_.end(), v);
    if (it == scope_.end() || *it != v) return *this;
    const std::size_t pos = it - scope_.begin();
    const auto strides = strides_for(cards_);
    const std::size_t inner = strides[pos];
    const std::size_t card = cards_[pos];
    const std::size_t outer = values_.size() / (inner * card);

    std::vector<VarId> scope = scope_;
    std::vector<std::size_t> cards = cards_;
    scope.erase(scope.begin() + pos);
    cards.erase(cards.begin() + pos);
    std::vector<double> values(outer * inner);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i)
            values[o * inner + i] = values_[(o * card + state) * inner + i];
    return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor Factor::reduce(const Assignment& evidence) const {
    Factor out = *this;
    for (auto [v, s] : evidence)
        if (out.contains(v)) out = out.reduce(v, s);
    return out;
}

Factor Factor::marginal(std::span<const VarId> keep) const {
    Factor out = *this;
    for (VarId v : scope_)
        if (std::find(keep.begin(), keep.end(), v) == keep.end()) out = out.sum_out(v);
    return out;
}

void Factor::normalize() {
    const double z = total();
    if (z > 0)
        for (double& x : values_) x /= z;
}

}  // namespace xbn
