#include "csibn/csi.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <set>
#include <stdexcept>

namespace csibn {

namespace {

bool occurs_on_consistent_path(const CptTree& t, const std::string& y, const Context& c) {
    if (t.is_leaf()) return false;
    if (t.test() == y) return true;
    if (auto bound = c.value_of(t.test())) {
        for (const auto& b : t.branches()) {
            if (b.value == *bound) return occurs_on_consistent_path(b.subtree, y, c);
        }
        return false;
    }
    for (const auto& b : t.branches()) {
        if (occurs_on_consistent_path(b.subtree, y, c)) return true;
    }
    return false;
}

void require_disjoint(std::initializer_list<const std::vector<std::string>*> sets) {
    std::set<std::string> seen;
    for (const auto* s : sets) {
        std::set<std::string> local(s->begin(), s->end());
        for (const auto& v : local) {
            if (!seen.insert(v).second) throw std::invalid_argument("variable sets must be disjoint: " + v);
        }
    }
}

std::vector<std::string> tested_in_order(const CptTree& reduced, const std::vector<std::string>& parents) {
    auto tested = tested_variables(reduced);
    std::vector<std::string> out;
    for (const auto& p : parents) {
        if (std::find(tested.begin(), tested.end(), p) != tested.end()) out.push_back(p);
    }
    return out;
}

}  // namespace

bool occurs_consistent(const CptTree& tree, const std::string& y, const Context& c) {
    if (c.binds(y)) throw std::invalid_argument("occurs_consistent: " + y + " is bound in the context");
    return occurs_on_consistent_path(tree, y, c);
}

std::vector<std::string> vacuous_parents(const Network& net, const std::string& x, const Context& c) {
    const Node& node = net.node(x);
    CptTree tree = cpt_as_tree(net, node);
    std::vector<std::string> out;
    for (const auto& p : node.parents) {
        if (c.binds(p)) continue;
        if (!occurs_on_consistent_path(tree, p, c)) out.push_back(p);
    }
    return out;
}

CptTree reduce_tree(const CptTree& tree, const Context& c) {
    if (tree.is_leaf()) return tree;
    if (auto bound = c.value_of(tree.test())) return reduce_tree(tree.branch(*bound), c);
    std::vector<CptBranch> branches;
    branches.reserve(tree.branches().size());
    for (const auto& b : tree.branches()) branches.push_back({b.value, reduce_tree(b.subtree, c)});
    return CptTree::node(tree.test(), std::move(branches));
}

bool d_separated(const Network& net, const std::vector<std::string>& xs, const std::vector<std::string>& ys,
                 const std::vector<std::string>& zs) {
    require_disjoint({&xs, &ys, &zs});
    const std::size_t n = net.nodes().size();
    auto index_of = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < n; ++i) {
            if (net.nodes()[i].var == name) return i;
        }
        throw std::out_of_range("unknown node: " + name);
    };
    std::vector<std::vector<std::size_t>> parents(n), children(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& p : net.nodes()[i].parents) {
            if (!net.find_node(p)) continue;
            std::size_t j = index_of(p);
            parents[i].push_back(j);
            children[j].push_back(i);
        }
    }
    std::vector<bool> observed(n, false), observed_or_ancestor(n, false);
    std::deque<std::size_t> up;
    for (const auto& z : zs) {
        std::size_t i = index_of(z);
        observed[i] = true;
        up.push_back(i);
    }
    while (!up.empty()) {
        std::size_t i = up.front();
        up.pop_front();
        if (observed_or_ancestor[i]) continue;
        observed_or_ancestor[i] = true;
        for (std::size_t p : parents[i]) up.push_back(p);
    }

    // Active-trail reachability; direction true = arrived from a child.
    std::vector<bool> target(n, false);
    for (const auto& y : ys) target[index_of(y)] = true;
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::deque<std::pair<std::size_t, bool>> frontier;
    for (const auto& x : xs) frontier.emplace_back(index_of(x), true);
    while (!frontier.empty()) {
        auto [i, from_child] = frontier.front();
        frontier.pop_front();
        if (visited[i][from_child]) continue;
        visited[i][from_child] = true;
        if (!observed[i] && target[i]) return false;
        if (from_child) {
            if (observed[i]) continue;
            for (std::size_t p : parents[i]) frontier.emplace_back(p, true);
            for (std::size_t ch : children[i]) frontier.emplace_back(ch, false);
        } else {
            if (!observed[i]) {
                for (std::size_t ch : children[i]) frontier.emplace_back(ch, false);
            }
            if (observed_or_ancestor[i]) {
                for (std::size_t p : parents[i]) frontier.emplace_back(p, true);
            }
        }
    }
    return true;
}

ContextNetwork context_network(const Network& net, const Context& c) {
    ContextNetwork out;
    out.base = net;
    out.context = c;
    std::vector<Node> nodes;
    nodes.reserve(net.nodes().size());
    for (const auto& node : net.nodes()) {
        auto vacuous = vacuous_parents(net, node.var, c);
        Node reduced = node;
        reduced.parents.clear();
        for (const auto& p : node.parents) {
            if (std::find(vacuous.begin(), vacuous.end(), p) == vacuous.end()) {
                reduced.parents.push_back(p);
            } else {
                out.deleted_edges.emplace_back(p, node.var);
            }
        }
        reduced.cpt = reduce_tree(cpt_as_tree(net, node), c.restricted_to(node.parents));
        nodes.push_back(std::move(reduced));
    }
    out.reduced = Network(net.variables(), std::move(nodes));
    return out;
}

bool csi_separated(const Network& net, const std::vector<std::string>& xs, const std::vector<std::string>& ys,
                   const std::vector<std::string>& zs, const Context& c) {
    auto cvars = c.variables();
    require_disjoint({&xs, &ys, &zs, &cvars});
    std::vector<std::string> separators = zs;
    separators.insert(separators.end(), cvars.begin(), cvars.end());
    return d_separated(context_network(net, c).reduced, xs, ys, separators);
}

Network instantiate_context(const Network& net, const Context& c) {
    std::vector<Node> nodes;
    nodes.reserve(net.nodes().size());
    for (const auto& node : net.nodes()) {
        Node reduced = node;
        CptTree tree = reduce_tree(cpt_as_tree(net, node), c.restricted_to(node.parents));
        reduced.parents = tested_in_order(tree, node.parents);
        reduced.cpt = std::move(tree);
        nodes.push_back(std::move(reduced));
    }
    return Network(net.variables(), std::move(nodes));
}

}  // namespace csibn
