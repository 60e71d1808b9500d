#include "csibn/cutset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "csibn/csi.hpp"

namespace csibn {

CutsetTree CutsetTree::node(std::string test, std::vector<CutsetArc> arcs) {
    if (test.empty()) throw std::invalid_argument("CutsetTree::node: empty test variable");
    CutsetTree t;
    t.test_ = std::move(test);
    t.arcs_ = std::move(arcs);
    return t;
}

bool operator==(const CutsetTree& a, const CutsetTree& b) { return a.test_ == b.test_ && a.arcs_ == b.arcs_; }

double variable_weight(const Variable& x) { return std::log2(static_cast<double>(x.cardinality())); }

namespace {

// EP(V, x = xi) for a child whose current parents are `parents` and whose
// current CPT is `tree`. `card` resolves cardinalities by name.
template <typename CardFn>
double expected_parents_of(const CptTree& tree, const std::vector<std::string>& parents, const std::string& x,
                           const std::string& xi, CardFn card) {
    if (parents.size() <= 1) return 0.0;
    Context given;
    given.bind(x, xi);
    double reduced = static_cast<double>(tree_size(reduce_tree(tree, given)));
    double sum = 0.0;
    for (const auto& a : parents) {
        if (a == x) continue;
        sum += std::log(reduced) / std::log(static_cast<double>(card(a)));
    }
    return sum / static_cast<double>(parents.size() - 1);
}

// ---------------------------------------------------------------------------
// Working graph for cutset construction. Parent lists hold only live arcs:
// arcs whose parent is still present and still tested by the child's CPT.
// Instantiated nodes keep their incoming arcs and lose their outgoing ones.

struct WorkNode {
    std::size_t card = 0;
    std::vector<std::string> values;
    std::vector<std::string> parents;
    CptTree tree;
    bool instantiated = false;
};

using WorkGraph = std::map<std::string, WorkNode>;

std::vector<std::string> live_parents(const CptTree& tree, const std::vector<std::string>& parents) {
    auto tested = tested_variables(tree);
    std::vector<std::string> out;
    for (const auto& p : parents) {
        if (std::find(tested.begin(), tested.end(), p) != tested.end()) out.push_back(p);
    }
    return out;
}

WorkGraph make_work_graph(const Network& net) {
    WorkGraph g;
    for (const auto& node : net.nodes()) {
        WorkNode w;
        const Variable& v = net.variable(node.var);
        w.card = v.cardinality();
        w.values = v.values;
        w.tree = cpt_as_tree(net, node);
        w.parents = live_parents(w.tree, node.parents);
        g.emplace(node.var, std::move(w));
    }
    return g;
}

void strip(WorkGraph& g) {
    for (;;) {
        std::map<std::string, std::set<std::string>> adj;
        for (const auto& [name, w] : g) {
            adj[name];
            for (const auto& p : w.parents) {
                adj[name].insert(p);
                adj[p].insert(name);
            }
        }
        std::vector<std::string> doomed;
        for (const auto& [name, nbrs] : adj) {
            if (nbrs.size() <= 1) doomed.push_back(name);
        }
        if (doomed.empty()) return;
        for (const auto& d : doomed) g.erase(d);
        for (auto& [name, w] : g) {
            std::erase_if(w.parents, [&](const std::string& p) {
                return std::binary_search(doomed.begin(), doomed.end(), p);
            });
        }
    }
}

HeuristicScore score(const WorkGraph& g, const std::string& x) {
    const WorkNode& xn = g.at(x);
    HeuristicScore s;
    s.variable = x;
    s.weight = std::log2(static_cast<double>(xn.card));
    auto card = [&](const std::string& a) { return g.at(a).card; };
    double d = 0.0;
    for (const auto& [name, child] : g) {
        if (std::find(child.parents.begin(), child.parents.end(), x) == child.parents.end()) continue;
        for (const auto& xi : xn.values) {
            d += static_cast<double>(child.parents.size()) - expected_parents_of(child.tree, child.parents, x, xi, card);
        }
    }
    s.deletion_score = d / static_cast<double>(xn.card);
    s.ratio = s.deletion_score > 0.0 ? s.weight / s.deletion_score : std::numeric_limits<double>::infinity();
    return s;
}

std::string skeleton(const CptTree& t) {
    if (t.is_leaf()) return ".";
    std::string s = t.test() + "(";
    for (std::size_t i = 0; i < t.branches().size(); ++i) {
        if (i) s += ',';
        s += skeleton(t.branches()[i].subtree);
    }
    return s + ")";
}

std::string signature(const WorkGraph& g) {
    std::string s;
    for (const auto& [name, w] : g) {
        s += name;
        s += w.instantiated ? "!" : ":";
        for (const auto& p : w.parents) s += p + ",";
        s += skeleton(w.tree);
        s += ';';
    }
    return s;
}

WorkGraph condition(const WorkGraph& g, const std::string& x, const std::string& xi) {
    WorkGraph out = g;
    out.at(x).instantiated = true;
    Context given;
    given.bind(x, xi);
    for (auto& [name, w] : out) {
        if (std::find(w.parents.begin(), w.parents.end(), x) == w.parents.end()) continue;
        w.tree = reduce_tree(w.tree, given);
        std::erase(w.parents, x);
        w.parents = live_parents(w.tree, w.parents);
    }
    return out;
}

template <typename Choose>
CutsetTree build(WorkGraph g, Choose choose) {
    strip(g);
    if (g.empty()) return {};
    const std::string x = choose(g);
    const WorkNode& xn = g.at(x);
    std::vector<CutsetArc> arcs;
    std::vector<std::string> signatures;
    std::vector<WorkGraph> graphs;
    for (const auto& xi : xn.values) {
        WorkGraph next = condition(g, x, xi);
        std::string sig = signature(next);
        auto it = std::find(signatures.begin(), signatures.end(), sig);
        if (it != signatures.end()) {
            arcs[static_cast<std::size_t>(it - signatures.begin())].values.push_back(xi);
            continue;
        }
        signatures.push_back(std::move(sig));
        graphs.push_back(std::move(next));
        arcs.push_back({{xi}, {}});
    }
    for (std::size_t i = 0; i < arcs.size(); ++i) arcs[i].child = build(std::move(graphs[i]), choose);
    return CutsetTree::node(x, std::move(arcs));
}

std::string greedy_choice(const WorkGraph& g) {
    std::optional<HeuristicScore> best;
    for (const auto& [name, w] : g) {  // name order gives the lexicographic tie-break
        if (w.instantiated) continue;
        HeuristicScore s = score(g, name);
        if (!best || s.ratio < best->ratio) best = s;
    }
    if (!best) throw std::logic_error("loopy residual without an admissible cutset variable");
    return best->variable;
}

void enumerate(const CutsetTree& t, Context& prefix, std::vector<Context>& out) {
    if (t.is_empty_leaf()) {
        out.push_back(prefix);
        return;
    }
    for (const auto& arc : t.arcs()) {
        for (const auto& value : arc.values) {
            Context next = prefix;
            next.bind(t.test(), value);
            enumerate(arc.child, next, out);
        }
    }
}

void collect_variables(const CutsetTree& t, std::vector<std::string>& out) {
    if (t.is_empty_leaf()) return;
    if (std::find(out.begin(), out.end(), t.test()) == out.end()) out.push_back(t.test());
    for (const auto& arc : t.arcs()) collect_variables(arc.child, out);
}

}  // namespace

double expected_parents(const Network& net, const std::string& v, const std::string& x, const std::string& xi) {
    const Node& node = net.node(v);
    if (std::find(node.parents.begin(), node.parents.end(), x) == node.parents.end()) {
        throw std::invalid_argument("expected_parents: " + x + " is not a parent of " + v);
    }
    if (!net.variable(x).value_index(xi)) throw std::invalid_argument("expected_parents: unknown value " + xi);
    auto card = [&](const std::string& a) { return net.variable(a).cardinality(); };
    return expected_parents_of(cpt_as_tree(net, node), node.parents, x, xi, card);
}

double arc_deletion_score(const Network& net, const std::string& x) {
    const Variable& xv = net.variable(x);
    double d = 0.0;
    for (const auto& child : net.children(x)) {
        const Node& node = net.node(child);
        for (const auto& xi : xv.values) {
            d += static_cast<double>(node.parents.size()) - expected_parents(net, child, x, xi);
        }
    }
    return d / static_cast<double>(xv.cardinality());
}

std::vector<HeuristicScore> heuristic_scores(const Network& net) {
    std::vector<HeuristicScore> out;
    for (const auto& v : net.variables()) {
        HeuristicScore s;
        s.variable = v.name;
        s.weight = variable_weight(v);
        s.deletion_score = arc_deletion_score(net, v.name);
        s.ratio = s.deletion_score > 0.0 ? s.weight / s.deletion_score : std::numeric_limits<double>::infinity();
        out.push_back(std::move(s));
    }
    return out;
}

Network strip_singly_connected(const Network& net) {
    std::set<std::string> alive;
    for (const auto& n : net.nodes()) alive.insert(n.var);
    for (;;) {
        std::map<std::string, std::set<std::string>> adj;
        for (const auto& n : net.nodes()) {
            if (!alive.count(n.var)) continue;
            adj[n.var];
            for (const auto& p : n.parents) {
                if (!alive.count(p)) continue;
                adj[n.var].insert(p);
                adj[p].insert(n.var);
            }
        }
        bool removed = false;
        for (const auto& [name, nbrs] : adj) {
            if (nbrs.size() <= 1) {
                alive.erase(name);
                removed = true;
            }
        }
        if (!removed) break;
    }
    std::vector<Variable> vars;
    for (const auto& v : net.variables()) {
        if (alive.count(v.name)) vars.push_back(v);
    }
    std::vector<Node> nodes;
    for (const auto& n : net.nodes()) {
        if (!alive.count(n.var)) continue;
        Node kept = n;
        std::erase_if(kept.parents, [&](const std::string& p) { return !alive.count(p); });
        nodes.push_back(std::move(kept));
    }
    return Network(std::move(vars), std::move(nodes));
}

CutsetTree build_conditional_cutset(const Network& net) { return build(make_work_graph(net), greedy_choice); }

CutsetTree order_cutset(const Network& net, const std::vector<std::string>& cutset) {
    for (const auto& v : cutset) {
        if (!net.find_node(v)) throw std::invalid_argument("order_cutset: unknown variable " + v);
    }
    auto next_on_loop = [&](const WorkGraph& g) {
        for (const auto& v : cutset) {
            auto it = g.find(v);
            if (it != g.end() && !it->second.instantiated) return v;
        }
        throw std::invalid_argument("order_cutset: the given variables do not cut every loop");
    };
    return build(make_work_graph(net), next_on_loop);
}

std::vector<Context> branch_contexts(const CutsetTree& tree) {
    std::vector<Context> out;
    Context prefix;
    enumerate(tree, prefix, out);
    return out;
}

CutsetTree flat_cutset(const Network& net, const std::vector<std::string>& vars) {
    CutsetTree tree;
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        std::vector<CutsetArc> arcs;
        for (const auto& value : net.variable(*it).values) arcs.push_back({{value}, tree});
        tree = CutsetTree::node(*it, std::move(arcs));
    }
    return tree;
}

std::vector<std::string> cutset_variables(const CutsetTree& tree) {
    std::vector<std::string> out;
    collect_variables(tree, out);
    return out;
}

std::size_t flat_cutset_size(const Network& net, const CutsetTree& tree) {
    std::size_t n = 1;
    for (const auto& v : cutset_variables(tree)) n *= net.variable(v).cardinality();
    return n;
}

}  // namespace csibn
