#ifndef CSIBN_TRANSFORM_HPP
#define CSIBN_TRANSFORM_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "csibn/model.hpp"

namespace csibn {

/// Every root-to-leaf path tests the same variables in the same order.
/// A single leaf is a full tree of depth 0.
bool is_full_tree(const CptTree& tree);

/// Name of the conditional node of `x` for `test = value`: `X@A=a`, and
/// `X@A=a,B=b` when `x` is itself a conditional node.
std::string conditional_node_name(const std::string& x, const std::string& test, const std::string& value);

/// Splits `x` on the variable at the root of its CPT tree. One conditional
/// node per root value takes the matching subtree as its CPT (parents: the
/// variables that subtree tests, in x's parent order); `x` becomes a
/// deterministic multiplexer table over (root variable, conditional nodes...).
/// Throws std::invalid_argument when x has a table CPT or a leaf root, and
/// when a generated name collides with an existing variable.
Network decompose_node(const Network& net, const std::string& x);

struct ConditionalNodeInfo {
    std::string name;
    std::vector<std::string> parents;
    std::size_t entries = 0;
};

struct DecompositionReport {
    std::string original;
    std::vector<ConditionalNodeInfo> conditionals;  // final (full-tree) conditional nodes
    std::vector<std::string> multiplexers;          // original node first, then nested ones
    std::size_t entries_before = 0;                 // leaves of the original tree
    std::size_t table_entries_before = 0;           // rows of the equivalent table
    std::size_t entries_after = 0;                  // sum over conditional CPTs
};

struct Decomposition {
    Network network;
    std::vector<DecompositionReport> reports;
};

/// Applies decompose_node recursively (topological order, depth first into
/// the new conditional nodes) until every non-multiplexer CPT is a full tree.
Decomposition decompose_network(const Network& net);

struct CliqueReport {
    std::vector<std::string> elimination_order;
    std::vector<std::vector<std::string>> cliques;  // maximal cliques, members sorted by name
    double max_clique_weight = 0.0;                 // max over cliques of sum log2 |val|
    double total_table_size = 0.0;                  // sum over cliques of prod |val|
};

/// Moralizes, triangulates with min-fill (ties by name) and reports the
/// maximal elimination cliques.
CliqueReport clique_report(const Network& net);

}  // namespace csibn

#endif  // CSIBN_TRANSFORM_HPP
