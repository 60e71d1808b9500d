#include "csibn/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace csibn {

namespace {

// Test sequence shared by every path, or nullopt when paths disagree.
std::optional<std::string> path_signature(const CptTree& t) {
    if (t.is_leaf()) return std::string();
    std::optional<std::string> common;
    for (const auto& b : t.branches()) {
        auto sig = path_signature(b.subtree);
        if (!sig) return std::nullopt;
        if (!common) {
            common = sig;
        } else if (*common != *sig) {
            return std::nullopt;
        }
    }
    return t.test() + "/" + common.value_or("");
}

std::vector<std::string> subtree_parents(const CptTree& subtree, const std::vector<std::string>& parent_order) {
    auto tested = tested_variables(subtree);
    std::vector<std::string> out;
    for (const auto& p : parent_order) {
        if (std::find(tested.begin(), tested.end(), p) != tested.end()) out.push_back(p);
    }
    return out;
}

void decompose_recursive(Network& net, const std::string& name, DecompositionReport& report) {
    const Node& before = net.node(name);
    const std::string test = std::get<CptTree>(before.cpt).test();
    std::vector<std::string> values = net.variable(test).values;
    net = decompose_node(net, name);
    report.multiplexers.push_back(name);
    for (const auto& value : values) {
        std::string child = conditional_node_name(name, test, value);
        const Node& node = net.node(child);
        const auto& tree = std::get<CptTree>(node.cpt);
        if (is_full_tree(tree)) {
            report.conditionals.push_back({child, node.parents, tree_size(tree)});
        } else {
            decompose_recursive(net, child, report);
        }
    }
}

}  // namespace

bool is_full_tree(const CptTree& tree) { return path_signature(tree).has_value(); }

std::string conditional_node_name(const std::string& x, const std::string& test, const std::string& value) {
    return x + (x.find('@') == std::string::npos ? "@" : ",") + test + "=" + value;
}

Network decompose_node(const Network& net, const std::string& x) {
    const Node& node = net.node(x);
    const auto* tree = std::get_if<CptTree>(&node.cpt);
    if (!tree) throw std::invalid_argument("decompose_node: " + x + " does not have a tree CPT");
    if (tree->is_leaf()) throw std::invalid_argument("decompose_node: the CPT tree of " + x + " is a single leaf");

    const Variable& owner = net.variable(x);
    const Variable& root = net.variable(tree->test());
    std::vector<Variable> new_vars;
    std::vector<Node> new_nodes;
    for (const auto& branch : tree->branches()) {
        std::string name = conditional_node_name(x, root.name, branch.value);
        if (net.find_variable(name)) throw std::invalid_argument("decompose_node: name collision on " + name);
        new_vars.push_back({name, owner.values});
        new_nodes.push_back({name, subtree_parents(branch.subtree, node.parents), false, branch.subtree});
    }

    // Multiplexer rows: row-major over (root, conditional nodes...); the row
    // for root value i copies the value of the i-th conditional node.
    const std::size_t k = owner.cardinality();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < new_vars.size(); ++i) combos *= k;
    CptTable mux;
    mux.rows.reserve(root.cardinality() * combos);
    for (std::size_t a = 0; a < root.cardinality(); ++a) {
        for (std::size_t combo = 0; combo < combos; ++combo) {
            // Digit of conditional node a within `combo` (last node fastest).
            std::size_t divisor = 1;
            for (std::size_t j = a + 1; j < new_vars.size(); ++j) divisor *= k;
            std::size_t selected = (combo / divisor) % k;
            Distribution row(k, 0.0);
            row[selected] = 1.0;
            mux.rows.push_back(std::move(row));
        }
    }
    Node multiplexer{x, {root.name}, true, std::move(mux)};
    for (const auto& v : new_vars) multiplexer.parents.push_back(v.name);

    std::vector<Variable> vars;
    for (const auto& v : net.variables()) {
        if (v.name == x) vars.insert(vars.end(), new_vars.begin(), new_vars.end());
        vars.push_back(v);
    }
    std::vector<Node> nodes;
    for (const auto& n : net.nodes()) {
        if (n.var == x) {
            nodes.insert(nodes.end(), new_nodes.begin(), new_nodes.end());
            nodes.push_back(multiplexer);
        } else {
            nodes.push_back(n);
        }
    }
    return Network(std::move(vars), std::move(nodes));
}

Decomposition decompose_network(const Network& net) {
    Decomposition out{net, {}};
    for (const auto& name : net.topological_order()) {
        const Node& node = out.network.node(name);
        const auto* tree = std::get_if<CptTree>(&node.cpt);
        if (!tree || node.deterministic || is_full_tree(*tree)) continue;
        DecompositionReport report;
        report.original = name;
        report.entries_before = tree_size(*tree);
        report.table_entries_before = parent_configurations(net, node);
        decompose_recursive(out.network, name, report);
        for (const auto& c : report.conditionals) report.entries_after += c.entries;
        out.reports.push_back(std::move(report));
    }
    return out;
}

CliqueReport clique_report(const Network& net) {
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& v : net.variables()) adj[v.name];
    for (const auto& node : net.nodes()) {
        for (std::size_t i = 0; i < node.parents.size(); ++i) {
            adj[node.var].insert(node.parents[i]);
            adj[node.parents[i]].insert(node.var);
            for (std::size_t j = i + 1; j < node.parents.size(); ++j) {
                adj[node.parents[i]].insert(node.parents[j]);
                adj[node.parents[j]].insert(node.parents[i]);
            }
        }
    }
    auto card = [&](const std::string& v) { return static_cast<double>(net.variable(v).cardinality()); };

    CliqueReport report;
    std::vector<std::vector<std::string>> raw;
    while (!adj.empty()) {
        std::string best;
        std::size_t best_fill = SIZE_MAX;
        for (const auto& [v, nbrs] : adj) {  // name order: first minimum wins ties
            std::size_t fill = 0;
            for (auto a = nbrs.begin(); a != nbrs.end(); ++a) {
                for (auto b = std::next(a); b != nbrs.end(); ++b) {
                    if (!adj.at(*a).count(*b)) ++fill;
                }
            }
            if (fill < best_fill) {
                best = v;
                best_fill = fill;
            }
        }
        const auto nbrs = adj.at(best);
        std::vector<std::string> clique(nbrs.begin(), nbrs.end());
        clique.push_back(best);
        std::sort(clique.begin(), clique.end());
        raw.push_back(std::move(clique));
        report.elimination_order.push_back(best);
        adj.erase(best);
        for (const auto& a : nbrs) {
            adj[a].erase(best);
            for (const auto& b : nbrs) {
                if (a != b) adj[a].insert(b);
            }
        }
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < raw.size() && !dominated; ++j) {
            if (i == j) continue;
            bool subset = std::includes(raw[j].begin(), raw[j].end(), raw[i].begin(), raw[i].end());
            // Equal cliques: keep the first occurrence only.
            dominated = subset && (raw[j].size() > raw[i].size() || j < i);
        }
        if (!dominated) report.cliques.push_back(raw[i]);
    }
    for (const auto& c : report.cliques) {
        double w = 0.0, size = 1.0;
        for (const auto& v : c) {
            w += std::log2(card(v));
            size *= card(v);
        }
        report.max_clique_weight = std::max(report.max_clique_weight, w);
        report.total_table_size += size;
    }
    return report;
}

}  // namespace csibn
