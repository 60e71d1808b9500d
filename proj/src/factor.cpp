#include "factor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace csibn::detail {

namespace {

std::vector<std::size_t> strides_for(const std::vector<std::size_t>& cards) {
    std::vector<std::size_t> strides(cards.size(), 1);
    for (std::size_t i = cards.size(); i-- > 1;) strides[i - 1] = strides[i] * cards[i];
    return strides;
}

std::size_t volume(const std::vector<std::size_t>& cards) {
    return std::accumulate(cards.begin(), cards.end(), std::size_t{1}, std::multiplies<>());
}

// Advances a mixed-radix counter (last digit fastest); false on wrap-around.
bool advance(std::vector<std::size_t>& digits, const std::vector<std::size_t>& radix) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < radix[i]) return true;
        digits[i] = 0;
    }
    return false;
}

}  // namespace

Factor::Factor(std::vector<std::size_t> vars, std::vector<std::size_t> cards, std::vector<double> values)
    : vars_(std::move(vars)), cards_(std::move(cards)), values_(std::move(values)) {
    if (vars_.size() != cards_.size() || values_.size() != volume(cards_) || !std::is_sorted(vars_.begin(), vars_.end())) {
        throw std::invalid_argument("Factor: inconsistent scope");
    }
}

bool Factor::contains(std::size_t var) const { return std::binary_search(vars_.begin(), vars_.end(), var); }

Factor Factor::product(const Factor& other) const {
    std::vector<std::size_t> vars, cards;
    std::set_union(vars_.begin(), vars_.end(), other.vars_.begin(), other.vars_.end(), std::back_inserter(vars));
    for (std::size_t v : vars) {
        auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
        if (it != vars_.end() && *it == v) {
            cards.push_back(cards_[static_cast<std::size_t>(it - vars_.begin())]);
        } else {
            auto jt = std::lower_bound(other.vars_.begin(), other.vars_.end(), v);
            cards.push_back(other.cards_[static_cast<std::size_t>(jt - other.vars_.begin())]);
        }
    }
    auto local_strides = [&](const Factor& f) {
        std::vector<std::size_t> own = strides_for(f.cards_);
        std::vector<std::size_t> out(vars.size(), 0);
        for (std::size_t i = 0; i < vars.size(); ++i) {
            auto it = std::lower_bound(f.vars_.begin(), f.vars_.end(), vars[i]);
            if (it != f.vars_.end() && *it == vars[i]) out[i] = own[static_cast<std::size_t>(it - f.vars_.begin())];
        }
        return out;
    };
    auto sa = local_strides(*this);
    auto sb = local_strides(other);
    std::vector<double> values(volume(cards));
    std::vector<std::size_t> digits(vars.size(), 0);
    std::size_t ia = 0, ib = 0;
    for (double& out : values) {
        out = values_[ia] * other.values_[ib];
        // Incremental update of both source indices as the counter advances.
        for (std::size_t i = digits.size(); i-- > 0;) {
            if (++digits[i] < cards[i]) {
                ia += sa[i];
                ib += sb[i];
                break;
            }
            ia -= sa[i] * (cards[i] - 1);
            ib -= sb[i] * (cards[i] - 1);
            digits[i] = 0;
        }
    }
    return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor Factor::sum_out(std::size_t var) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it == vars_.end() || *it != var) return *this;
    std::size_t pos = static_cast<std::size_t>(it - vars_.begin());
    std::vector<std::size_t> vars = vars_, cards = cards_;
    vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(pos));
    cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));
    std::vector<double> values(volume(cards), 0.0);
    std::size_t inner = strides_for(cards_)[pos];
    std::size_t card = cards_[pos];
    for (std::size_t i = 0; i < values_.size(); ++i) {
        std::size_t outer = i / (inner * card);
        std::size_t rest = i % inner;
        values[outer * inner + rest] += values_[i];
    }
    return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor Factor::reduce(std::size_t var, std::size_t value) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it == vars_.end() || *it != var) return *this;
    std::size_t pos = static_cast<std::size_t>(it - vars_.begin());
    std::vector<std::size_t> vars = vars_, cards = cards_;
    vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(pos));
    cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));
    std::vector<double> values(volume(cards), 0.0);
    std::size_t inner = strides_for(cards_)[pos];
    std::size_t card = cards_[pos];
    for (std::size_t j = 0; j < values.size(); ++j) {
        std::size_t outer = j / inner;
        std::size_t rest = j % inner;
        values[j] = values_[outer * inner * card + value * inner + rest];
    }
    return Factor(std::move(vars), std::move(cards), std::move(values));
}

double Factor::total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

CompiledNetwork compile(const Network& net) {
    CompiledNetwork cn;
    for (const auto& v : net.variables()) cn.cards.push_back(v.cardinality());
    for (const auto& node : net.nodes()) {
        CompiledNode c;
        c.var = *net.variable_index(node.var);
        for (const auto& p : node.parents) c.scope.push_back(*net.variable_index(p));
        c.scope.push_back(c.var);
        std::vector<std::size_t> cards;
        for (std::size_t s : c.scope) cards.push_back(cn.cards[s]);
        c.strides = strides_for(cards);
        c.table.assign(volume(cards), 0.0);

        const std::size_t child_card = cn.cards[c.var];
        std::vector<std::size_t> parent_cards(cards.begin(), cards.end() - 1);
        std::vector<std::size_t> digits(parent_cards.size(), 0);
        const CptTable* table = std::get_if<CptTable>(&node.cpt);
        const CptTree* tree = std::get_if<CptTree>(&node.cpt);
        std::size_t row = 0;
        do {
            const Distribution* d = nullptr;
            if (table) {
                d = &table->rows.at(row);
            } else {
                d = &tree_lookup(*tree, [&](const std::string& name) {
                    for (std::size_t i = 0; i < node.parents.size(); ++i) {
                        if (node.parents[i] == name) return digits[i];
                    }
                    throw std::invalid_argument("tree for " + node.var + " tests non-parent " + name);
                });
            }
            std::copy(d->begin(), d->end(), c.table.begin() + static_cast<std::ptrdiff_t>(row * child_card));
            ++row;
        } while (advance(digits, parent_cards));
        cn.nodes.push_back(std::move(c));
    }
    return cn;
}

Factor family_factor(const CompiledNetwork& cn, const CompiledNode& node) {
    std::vector<std::size_t> order(node.scope.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return node.scope[a] < node.scope[b]; });
    std::vector<std::size_t> vars, cards, strides;
    for (std::size_t i : order) {
        vars.push_back(node.scope[i]);
        cards.push_back(cn.cards[node.scope[i]]);
        strides.push_back(node.strides[i]);
    }
    std::vector<double> values(volume(cards));
    std::vector<std::size_t> digits(vars.size(), 0);
    for (double& v : values) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < digits.size(); ++i) idx += digits[i] * strides[i];
        v = node.table[idx];
        advance(digits, cards);
    }
    return Factor(std::move(vars), std::move(cards), std::move(values));
}

double joint_at(const CompiledNetwork& cn, const std::vector<std::size_t>& assignment) {
    double p = 1.0;
    for (const auto& node : cn.nodes) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < node.scope.size(); ++i) idx += assignment[node.scope[i]] * node.strides[i];
        p *= node.table[idx];
    }
    return p;
}

}  // namespace csibn::detail
