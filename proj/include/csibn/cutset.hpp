#ifndef CSIBN_CUTSET_HPP
#define CSIBN_CUTSET_HPP

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "csibn/model.hpp"

namespace csibn {

struct CutsetArc;

/// Tree-structured conditional cutset. Interior nodes name a variable; each
/// outgoing arc carries a set of that variable's values. A default-constructed
/// tree is the empty leaf.
class CutsetTree {
public:
    CutsetTree() = default;
    static CutsetTree node(std::string test, std::vector<CutsetArc> arcs);

    bool is_empty_leaf() const { return test_.empty(); }
    const std::string& test() const { return test_; }
    std::span<const CutsetArc> arcs() const { return arcs_; }

    friend bool operator==(const CutsetTree& a, const CutsetTree& b);

private:
    std::string test_;
    std::vector<CutsetArc> arcs_;
};

struct CutsetArc {
    std::vector<std::string> values;
    CutsetTree child;

    friend bool operator==(const CutsetArc&, const CutsetArc&) = default;
};

struct HeuristicScore {
    std::string variable;
    double weight = 0.0;
    double deletion_score = 0.0;
    double ratio = std::numeric_limits<double>::infinity();  // w / d'; +inf when d' == 0
};

/// log2 |val(x)|.
double variable_weight(const Variable& x);

/// Expected number of parents of `v` once `x = xi` is known, from the size of
/// v's reduced CPT. Zero when `x` is v's only parent.
/// Throws std::invalid_argument when `x` is not a parent of `v`.
double expected_parents(const Network& net, const std::string& v, const std::string& x, const std::string& xi);

/// d'(x): expected number of arcs deleted from the network by instantiating `x`.
double arc_deletion_score(const Network& net, const std::string& x);

/// Scores of every variable of `net` in declaration order.
std::vector<HeuristicScore> heuristic_scores(const Network& net);

/// Repeatedly removes nodes with at most one neighbour in the undirected
/// skeleton. Surviving nodes keep their CPTs; parent lists drop removed nodes,
/// so the result is a structural view and may not validate.
Network strip_singly_connected(const Network& net);

/// Greedy conditional cutset: strip, pick the minimum w/d' variable (ties by
/// name), condition on each value, merge structurally identical branches and
/// recurse. Every branch context leaves a singly connected network.
CutsetTree build_conditional_cutset(const Network& net);

/// Conditional version of a standard cutset: in each branch, instantiates the
/// first variable of `cutset` that still lies in the loopy residual, so
/// variables whose loops were cut by vacuous arcs are skipped.
/// Throws std::invalid_argument when `cutset` leaves a loop uncut or names an
/// unknown variable.
CutsetTree order_cutset(const Network& net, const std::vector<std::string>& cutset);

/// One context per root-to-leaf path and value choice, depth first, arcs in
/// order and values in stored order.
std::vector<Context> branch_contexts(const CutsetTree& tree);

/// Full product tree over `vars` (in the given order), one value per arc.
CutsetTree flat_cutset(const Network& net, const std::vector<std::string>& vars);

/// Distinct variables tested anywhere in the tree, in first-visit order.
std::vector<std::string> cutset_variables(const CutsetTree& tree);

/// Number of contexts of the flat cutset over the tree's variables.
std::size_t flat_cutset_size(const Network& net, const CutsetTree& tree);

}  // namespace csibn

#endif  // CSIBN_CUTSET_HPP
