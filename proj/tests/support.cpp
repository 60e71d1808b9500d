#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "csibn/csi.hpp"
#include "csibn/network_io.hpp"

namespace testing {

std::string fixture_path(const std::string& name) { return std::string(CSIBN_FIXTURE_DIR) + "/" + name; }

Network fixture(const std::string& name) { return csibn::load_network(fixture_path(name)); }

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(CSIBN_FIXTURE_DIR)) {
        if (e.path().extension() == ".json") out.push_back(e.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void for_each_assignment(const Network& net, const std::function<void(const Assignment&)>& fn) {
    const auto& vars = net.variables();
    Assignment a(vars.size(), 0);
    for (;;) {
        fn(a);
        std::size_t i = vars.size();
        while (i > 0) {
            --i;
            if (++a[i] < vars[i].cardinality()) break;
            a[i] = 0;
            if (i == 0) return;
        }
        if (vars.empty()) return;
    }
}

namespace {

std::size_t index_in(const Network& net, const Assignment& a, const std::string& var) {
    return a[*net.variable_index(var)];
}

const csibn::Distribution& walk(const Network& net, const csibn::CptTree& t, const Assignment& a) {
    if (t.is_leaf()) return t.distribution();
    const auto& v = net.variable(t.test());
    const std::string& value = v.values[index_in(net, a, t.test())];
    for (const auto& b : t.branches()) {
        if (b.value == value) return walk(net, b.subtree, a);
    }
    throw std::logic_error("tree branch missing for " + t.test() + "=" + value);
}

}  // namespace

double oracle_joint(const Network& net, const Assignment& a) {
    double p = 1.0;
    for (const auto& node : net.nodes()) {
        std::size_t own = index_in(net, a, node.var);
        if (const auto* table = std::get_if<csibn::CptTable>(&node.cpt)) {
            std::size_t row = 0;
            for (const auto& parent : node.parents) {
                row = row * net.variable(parent).cardinality() + index_in(net, a, parent);
            }
            p *= table->rows.at(row).at(own);
        } else {
            p *= walk(net, std::get<csibn::CptTree>(node.cpt), a).at(own);
        }
    }
    return p;
}

std::pair<std::vector<double>, double> oracle_posterior(const Network& net, const std::string& target,
                                                        const Context& evidence) {
    const auto& tv = net.variable(target);
    std::vector<double> w(tv.cardinality(), 0.0);
    std::size_t t_idx = *net.variable_index(target);
    for_each_assignment(net, [&](const Assignment& a) {
        for (const auto& [var, value] : evidence.bindings()) {
            const auto& v = net.variable(var);
            if (v.values[a[*net.variable_index(var)]] != value) return;
        }
        w[a[t_idx]] += oracle_joint(net, a);
    });
    double z = 0.0;
    for (double x : w) z += x;
    for (double& x : w) x /= z;
    return {w, z};
}

std::vector<Context> all_contexts(const Network& net, const std::vector<std::string>& vars) {
    std::vector<Context> out{Context{}};
    for (const auto& v : vars) {
        std::vector<Context> next;
        for (const auto& c : out) {
            for (const auto& value : net.variable(v).values) {
                Context d = c;
                d.bind(v, value);
                next.push_back(std::move(d));
            }
        }
        out = std::move(next);
    }
    return out;
}

bool moral_dsep_oracle(const Network& net, const std::vector<std::string>& xs, const std::vector<std::string>& ys,
                       const std::vector<std::string>& zs) {
    std::set<std::string> anc;
    std::vector<std::string> stack(xs);
    stack.insert(stack.end(), ys.begin(), ys.end());
    stack.insert(stack.end(), zs.begin(), zs.end());
    while (!stack.empty()) {
        std::string v = stack.back();
        stack.pop_back();
        if (!anc.insert(v).second) continue;
        for (const auto& p : net.node(v).parents) stack.push_back(p);
    }
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& v : anc) {
        const auto& ps = net.node(v).parents;
        for (const auto& p : ps) {
            adj[v].insert(p);
            adj[p].insert(v);
            for (const auto& q : ps) {
                if (p != q) adj[p].insert(q);
            }
        }
    }
    std::set<std::string> blocked(zs.begin(), zs.end());
    std::set<std::string> seen;
    std::vector<std::string> frontier(xs);
    while (!frontier.empty()) {
        std::string v = frontier.back();
        frontier.pop_back();
        if (blocked.count(v) || !seen.insert(v).second) continue;
        if (std::find(ys.begin(), ys.end(), v) != ys.end()) return false;
        for (const auto& n : adj[v]) frontier.push_back(n);
    }
    return true;
}

bool has_undirected_cycle(const std::vector<std::string>& vertices,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
    std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> adj;
    for (const auto& v : vertices) adj[v];
    for (std::size_t i = 0; i < edges.size(); ++i) {
        adj[edges[i].first].push_back({edges[i].second, i});
        adj[edges[i].second].push_back({edges[i].first, i});
    }
    std::set<std::string> seen;
    for (const auto& [root, unused] : adj) {
        if (seen.count(root)) continue;
        // (vertex, edge used to reach it)
        std::vector<std::pair<std::string, std::size_t>> stack{{root, SIZE_MAX}};
        while (!stack.empty()) {
            auto [v, via] = stack.back();
            stack.pop_back();
            if (!seen.insert(v).second) return true;
            for (const auto& [w, e] : adj[v]) {
                if (e != via) stack.push_back({w, e});
            }
        }
    }
    return false;
}

namespace {

bool forest_after(const Network& net, const Context& c, bool remove_bound) {
    std::vector<std::string> vertices;
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& node : net.nodes()) {
        if (remove_bound && c.binds(node.var)) continue;
        vertices.push_back(node.var);
        auto vacuous = csibn::vacuous_parents(net, node.var, c);
        for (const auto& p : node.parents) {
            if (c.binds(p)) continue;  // outgoing arc of an instantiated node
            if (std::find(vacuous.begin(), vacuous.end(), p) != vacuous.end()) continue;
            edges.push_back({p, node.var});
        }
    }
    return !has_undirected_cycle(vertices, edges);
}

}  // namespace

bool branch_leaves_forest(const Network& net, const Context& c) { return forest_after(net, c, false); }
bool branch_leaves_forest_removing(const Network& net, const Context& c) { return forest_after(net, c, true); }

std::vector<std::string> subset(const std::vector<std::string>& xs, std::uint64_t mask) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (mask & (std::uint64_t{1} << i)) out.push_back(xs[i]);
    }
    return out;
}

}  // namespace testing
