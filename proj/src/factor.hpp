#ifndef CSIBN_SRC_FACTOR_HPP
#define CSIBN_SRC_FACTOR_HPP

#include <cstddef>
#include <vector>

#include "csibn/model.hpp"

namespace csibn::detail {

// Dense table over variable indices kept in ascending order; row-major with
// the last variable varying fastest.
class Factor {
public:
    Factor() : values_{1.0} {}
    Factor(std::vector<std::size_t> vars, std::vector<std::size_t> cards, std::vector<double> values);

    const std::vector<std::size_t>& vars() const { return vars_; }
    const std::vector<std::size_t>& cards() const { return cards_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool contains(std::size_t var) const;

    Factor product(const Factor& other) const;
    Factor sum_out(std::size_t var) const;
    /// Fixes `var` to `value` and drops it from the scope.
    Factor reduce(std::size_t var, std::size_t value) const;
    double total() const;

private:
    std::vector<std::size_t> vars_;
    std::vector<std::size_t> cards_;
    std::vector<double> values_;
};

// Index view of a network: cardinalities plus, per node, the family table
// P(var | parents) laid out over (parents..., var) in declared parent order.
struct CompiledNode {
    std::size_t var = 0;
    std::vector<std::size_t> scope;  // parents..., var
    std::vector<std::size_t> strides;
    std::vector<double> table;
};

struct CompiledNetwork {
    std::vector<std::size_t> cards;
    std::vector<CompiledNode> nodes;
};

CompiledNetwork compile(const Network& net);

/// Family factor of a compiled node, in ascending variable order.
Factor family_factor(const CompiledNetwork& cn, const CompiledNode& node);

/// Product over all nodes of P(var | parents) at a full assignment.
double joint_at(const CompiledNetwork& cn, const std::vector<std::size_t>& assignment);

}  // namespace csibn::detail

#endif  // CSIBN_SRC_FACTOR_HPP
