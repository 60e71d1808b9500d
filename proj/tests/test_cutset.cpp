#include <doctest.h>

#include <cmath>
#include <random>

#include "csibn/csi.hpp"
#include "csibn/cutset.hpp"
#include "csibn/network_io.hpp"
#include "csibn/random_network.hpp"
#include "support.hpp"

using namespace csibn;

namespace {

std::vector<std::string> names_of(const Network& net) {
    std::vector<std::string> out;
    for (const auto& v : net.variables()) out.push_back(v.name);
    return out;
}

std::string shape(const CptTree& t) {
    if (t.is_leaf()) return ".";
    std::string s = t.test() + "(";
    for (const auto& b : t.branches()) s += shape(b.subtree) + " ";
    return s + ")";
}

// Structure of a network after instantiating `c`: parent lists and tree shapes.
std::string structure(const Network& net, const Context& c) {
    Network n = instantiate_context(net, c);
    std::string s;
    for (const auto& node : n.nodes()) {
        if (c.binds(node.var)) continue;
        s += node.var + "<";
        for (const auto& p : node.parents) s += p + ",";
        s += shape(cpt_as_tree(n, node)) + ";";
    }
    return s;
}

void check_merges(const Network& net, const CutsetTree& t, const Context& prefix) {
    if (t.is_empty_leaf()) return;
    for (const auto& arc : t.arcs()) {
        std::string first;
        for (const auto& value : arc.values) {
            Context c = prefix;
            c.bind(t.test(), value);
            std::string s = structure(net, c);
            if (first.empty()) {
                first = s;
            } else {
                CHECK(s == first);
            }
        }
        Context c = prefix;
        c.bind(t.test(), arc.values.front());
        check_merges(net, arc.child, c);
    }
}

void check_partition(const CutsetTree& t, const Network& net) {
    for (const auto& arc : t.arcs()) CHECK_FALSE(arc.values.empty());
    if (!t.is_empty_leaf()) {
        std::vector<std::string> seen;
        for (const auto& arc : t.arcs()) seen.insert(seen.end(), arc.values.begin(), arc.values.end());
        std::sort(seen.begin(), seen.end());
        auto expect = net.variable(t.test()).values;
        std::sort(expect.begin(), expect.end());
        CHECK(seen == expect);
        for (const auto& arc : t.arcs()) check_partition(arc.child, net);
    }
}

}  // namespace

TEST_CASE("weights") {
    CHECK(variable_weight({"A", {"t", "f"}}) == 1.0);
    CHECK(variable_weight({"A", {"a", "b", "c", "d"}}) == 2.0);
    CHECK(variable_weight({"A", {"a", "b", "c"}}) == doctest::Approx(std::log2(3.0)));
}

TEST_CASE("expected parents and arc deletion scores on fig2") {
    Network fig2 = testing::fixture("fig2.json");
    CHECK(expected_parents(fig2, "X", "A", "t") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expected_parents(fig2, "X", "A", "f") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(arc_deletion_score(fig2, "A") == doctest::Approx(2.5).epsilon(1e-12));
    double b = ((4 - std::log2(3.0)) + (4 - std::log2(5.0))) / 2;
    CHECK(arc_deletion_score(fig2, "B") == doctest::Approx(b).epsilon(1e-12));
    CHECK(arc_deletion_score(fig2, "X") == 0.0);
    CHECK_THROWS_AS(expected_parents(fig2, "X", "X", "t"), std::invalid_argument);
    CHECK_THROWS_AS(expected_parents(fig2, "A", "B", "t"), std::invalid_argument);

    Network chain = testing::fixture("chain.json");
    CHECK(expected_parents(chain, "B", "A", "t") == 0.0);
    CHECK(arc_deletion_score(chain, "A") == 1.0);

    auto scores = heuristic_scores(fig2);
    auto best = std::min_element(scores.begin(), scores.end(),
                                 [](const auto& x, const auto& y) { return x.ratio < y.ratio; });
    CHECK(best->variable == "A");
    CHECK(best->ratio == doctest::Approx(0.4));
    CHECK(std::isinf(scores.back().ratio));
}

TEST_CASE("argmin is invariant under a change of log base") {
    // Every score scales by the same factor, so ratios keep their order.
    Network fig2 = testing::fixture("fig2.json");
    auto scores = heuristic_scores(fig2);
    for (const auto& s : scores) {
        if (std::isinf(s.ratio)) continue;
        double w_e = s.weight * std::log(2.0);
        CHECK(w_e / s.deletion_score == doctest::Approx(s.ratio * std::log(2.0)));
    }
}

TEST_CASE("strip singly connected nodes") {
    CHECK(strip_singly_connected(testing::fixture("polytree.json")).size() == 0);
    CHECK(strip_singly_connected(testing::fixture("chain.json")).size() == 0);
    Network diamond = testing::fixture("diamond.json");
    CHECK(strip_singly_connected(diamond) == diamond);
    // Z keeps two neighbours (X and W), so nothing strips from fig1.
    Network fig1 = testing::fixture("fig1.json");
    CHECK(names_of(strip_singly_connected(fig1)) == names_of(fig1));

    // A star strips completely.
    Network residual = strip_singly_connected(testing::fixture("fig3.json"));
    CHECK(residual.size() == 0);
}

TEST_CASE("branch contexts") {
    CHECK(branch_contexts(CutsetTree{}) == std::vector<Context>{Context{}});
    Network fig1 = testing::fixture("fig1.json");
    CutsetTree flat = flat_cutset(fig1, {"U", "V", "W"});
    CHECK(branch_contexts(flat).size() == 8);
    CHECK(flat_cutset_size(fig1, flat) == 8);
    CHECK(cutset_variables(flat) == std::vector<std::string>{"U", "V", "W"});
}

TEST_CASE("ordering the standard cutset {U,V,W} on fig1 gives five contexts") {
    Network fig1 = testing::fixture("fig1.json");
    CutsetTree t = order_cutset(fig1, {"U", "V", "W"});
    REQUIRE_FALSE(t.is_empty_leaf());
    CHECK(t.test() == "U");
    REQUIRE(t.arcs().size() == 2);
    CHECK(t.arcs()[0].values == std::vector<std::string>{"t"});
    CHECK(t.arcs()[0].child.is_empty_leaf());
    const CutsetTree& v = t.arcs()[1].child;
    CHECK(v.test() == "V");
    CHECK(v.arcs()[0].child.test() == "W");
    CHECK(branch_contexts(t) == std::vector<Context>{{{"U", "t"}},
                                                     {{"U", "f"}, {"V", "t"}, {"W", "t"}},
                                                     {{"U", "f"}, {"V", "t"}, {"W", "f"}},
                                                     {{"U", "f"}, {"V", "f"}, {"W", "t"}},
                                                     {{"U", "f"}, {"V", "f"}, {"W", "f"}}});
    CHECK(flat_cutset_size(fig1, t) == 8);

    CHECK_THROWS_AS(order_cutset(fig1, {"U", "V"}), std::invalid_argument);
    CHECK_THROWS_AS(order_cutset(fig1, {"Q"}), std::invalid_argument);
    CHECK(order_cutset(testing::fixture("chain.json"), {}).is_empty_leaf());
}

TEST_CASE("greedy cutset on the fixtures") {
    CHECK(build_conditional_cutset(testing::fixture("polytree.json")).is_empty_leaf());
    CHECK(build_conditional_cutset(testing::fixture("fig2.json")).is_empty_leaf());

    // Hand-traced: S has the best ratio (1/3), both of its values leave the same
    // structure, and only the W-X-Z loop remains.
    Network fig1 = testing::fixture("fig1.json");
    CutsetTree t = build_conditional_cutset(fig1);
    CHECK(t.test() == "S");
    REQUIRE(t.arcs().size() == 1);
    CHECK(t.arcs()[0].values == std::vector<std::string>{"t", "f"});
    CHECK(t.arcs()[0].child.test() == "W");
    CHECK(branch_contexts(t).size() == 4);

    // All values of A leave identical structure in the diamond.
    CutsetTree d = build_conditional_cutset(testing::fixture("diamond.json"));
    CHECK(d.test() == "A");
    CHECK(d.arcs().size() == 1);
    CHECK(branch_contexts(d).size() == 3);
}

TEST_CASE("cutset properties on random loopy networks") {
    std::mt19937_64 rng(707);
    for (int trial = 0; trial < 60; ++trial) {
        RandomNetworkOptions o;
        o.variables = 4 + static_cast<std::size_t>(trial % 5);
        o.max_parents = 3;
        o.cardinality = 2 + static_cast<std::size_t>(trial % 4 == 0);
        Network net = random_loopy_network(rng, o);
        CAPTURE(serialize_network(net));
        CutsetTree t = build_conditional_cutset(net);
        auto contexts = branch_contexts(t);
        check_partition(t, net);
        check_merges(net, t, Context{});
        CHECK(contexts.size() <= flat_cutset_size(net, t));
        for (const auto& c : contexts) {
            CHECK(testing::branch_leaves_forest(net, c));
            CHECK(testing::branch_leaves_forest_removing(net, c));
        }
        // Every full assignment matches exactly one context.
        testing::for_each_assignment(net, [&](const testing::Assignment& a) {
            Context full;
            for (std::size_t i = 0; i < a.size(); ++i) {
                full.bind(net.variables()[i].name, net.variables()[i].values[a[i]]);
            }
            std::size_t matches = 0;
            for (const auto& c : contexts) matches += c.consistent_with(full);
            CHECK(matches == 1);
        });
    }
}
